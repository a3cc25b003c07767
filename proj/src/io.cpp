#include "distreg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "distreg/errors.hpp"

namespace distreg {

namespace {

constexpr double kMassTol = 1e-8;
constexpr double kGramTol = 1e-10;
constexpr double kReproducingTol = 1e-8;

bool parse_double_field(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::vector<Bag> read_jsonl(std::istream& in) {
    std::vector<Bag> bags;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = strip_cr(line);
        if (text.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (!record.is_object())
            throw ParseError("line " + std::to_string(line_no) + ": expected a JSON object",
                             line_no);
        for (const auto& item : record.items())
            if (item.key() != "bag_id" && item.key() != "y" && item.key() != "x")
                throw ParseError("line " + std::to_string(line_no) + ": unknown field '" +
                                     item.key() + "'",
                                 line_no);
        if (!record.contains("bag_id") || !record["bag_id"].is_string())
            throw ParseError("line " + std::to_string(line_no) + ": missing string field 'bag_id'",
                             line_no);
        if (!record.contains("y") || !record["y"].is_number())
            throw ParseError("line " + std::to_string(line_no) + ": missing numeric field 'y'",
                             line_no);
        if (!record.contains("x") || !record["x"].is_array() || record["x"].empty())
            throw ParseError("line " + std::to_string(line_no) + ": field 'x' must be a nonempty array",
                             line_no);
        Bag bag;
        bag.id = record["bag_id"].get<std::string>();
        bag.y = record["y"].get<double>();
        if (!std::isfinite(bag.y))
            throw ParseError("line " + std::to_string(line_no) + ": non-finite value for 'y'",
                             line_no);
        for (const auto& v : record["x"]) {
            if (!v.is_number())
                throw ParseError("line " + std::to_string(line_no) + ": 'x' entries must be numbers",
                                 line_no);
            const double x = v.get<double>();
            if (!std::isfinite(x))
                throw ParseError("line " + std::to_string(line_no) + ": non-finite value in 'x'",
                                 line_no);
            bag.xs.push_back(x);
        }
        if (!seen.insert(bag.id).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate bag_id '" +
                                 bag.id + "'",
                             line_no);
        bags.push_back(std::move(bag));
    }
    if (bags.empty()) throw ParseError("empty dataset");
    return bags;
}

std::vector<Bag> read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty dataset");
    ++line_no;
    if (strip_cr(line) != "bag_id,y,x")
        throw ParseError("line 1: expected header 'bag_id,y,x'", 1);

    std::vector<Bag> bags;
    std::unordered_set<std::string> finished;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = strip_cr(line);
        if (text.empty()) continue;
        const std::size_t c1 = text.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
        if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) +
                                 ": expected three fields 'bag_id,y,x'",
                             line_no);
        const std::string id(text.substr(0, c1));
        double y = 0.0;
        double x = 0.0;
        if (!parse_double_field(text.substr(c1 + 1, c2 - c1 - 1), y))
            throw ParseError("line " + std::to_string(line_no) + ": cannot parse 'y'", line_no);
        if (!parse_double_field(text.substr(c2 + 1), x))
            throw ParseError("line " + std::to_string(line_no) + ": cannot parse 'x'", line_no);
        if (!std::isfinite(y) || !std::isfinite(x))
            throw ParseError("line " + std::to_string(line_no) + ": non-finite value", line_no);
        if (!bags.empty() && bags.back().id == id) {
            if (bags.back().y != y)
                throw ParseError("line " + std::to_string(line_no) + ": bag '" + id +
                                     "' changes its y value",
                                 line_no);
            bags.back().xs.push_back(x);
            continue;
        }
        if (finished.contains(id))
            throw ParseError("line " + std::to_string(line_no) + ": rows of bag '" + id +
                                 "' are not contiguous",
                             line_no);
        if (!bags.empty()) finished.insert(bags.back().id);
        Bag bag;
        bag.id = id;
        bag.y = y;
        bag.xs.push_back(x);
        bags.push_back(std::move(bag));
    }
    if (bags.empty()) throw ParseError("empty dataset");
    return bags;
}

void write_jsonl(std::ostream& out, std::span<const Bag> bags) {
    for (const Bag& bag : bags) {
        nlohmann::json record;
        record["bag_id"] = bag.id;
        record["y"] = bag.y;
        record["x"] = bag.xs;
        out << record.dump() << '\n';
    }
}

void write_csv(std::ostream& out, std::span<const Bag> bags) {
    out << "bag_id,y,x\n";
    for (const Bag& bag : bags) {
        if (bag.id.find_first_of(",\"\r\n") != std::string::npos)
            throw ValidationError("csv: bag_id '" + bag.id + "' contains a delimiter");
        const std::string y = format_double(bag.y);
        for (double x : bag.xs) out << bag.id << ',' << y << ',' << format_double(x) << '\n';
    }
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double matrix_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

std::string describe(double v) { return format_double(v); }

}  // namespace

FileFormat format_from_name(std::string_view name) {
    if (name == "jsonl") return FileFormat::Jsonl;
    if (name == "csv") return FileFormat::Csv;
    throw ValidationError("unknown format '" + std::string(name) + "' (expected jsonl|csv)");
}

std::optional<FileFormat> format_from_extension(std::string_view path) {
    const std::size_t dot = path.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    const std::string_view ext = path.substr(dot + 1);
    if (ext == "jsonl") return FileFormat::Jsonl;
    if (ext == "csv") return FileFormat::Csv;
    return std::nullopt;
}

std::vector<Bag> read_bags(std::istream& in, FileFormat format) {
    return format == FileFormat::Jsonl ? read_jsonl(in) : read_csv(in);
}

std::vector<Bag> load_bags(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_bags(in, format);
}

void write_bags(std::ostream& out, std::span<const Bag> bags, FileFormat format) {
    if (format == FileFormat::Jsonl)
        write_jsonl(out, bags);
    else
        write_csv(out, bags);
}

void save_bags(const std::string& path, std::span<const Bag> bags, FileFormat format) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    write_bags(out, bags, format);
    if (!out) throw ParseError("failed writing '" + path + "'");
}

Dataset load_dataset(const std::string& path, FileFormat format,
                     BasisFamily family, int dx, int dy) {
    return make_dataset(load_bags(path, format), family, dx, dy);
}

std::string format_double(double v) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

std::vector<double> default_grid(const Dataset& ds, int n) {
    if (n < 1) throw ValidationError("default_grid: need at least one point");
    double lo = ds.bags.front().y;
    double hi = lo;
    for (const Bag& bag : ds.bags) {
        lo = std::min(lo, bag.y);
        hi = std::max(hi, bag.y);
    }
    std::vector<double> grid(static_cast<std::size_t>(n));
    if (n == 1) {
        grid[0] = 0.5 * (lo + hi);
        return grid;
    }
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
    grid.back() = hi;
    return grid;
}

std::vector<EvalRow> run_eval_grid(const TwoStepModel& model, double x,
                                   std::span<const double> grid) {
    const ConditionalModel cond = model.conditional(x);
    const ConditionalModel uncond = model.unconditional();
    std::vector<EvalRow> rows;
    rows.reserve(grid.size());
    for (double y : grid) {
        const double lc = conditional_lambda(cond, y);
        const double lu = conditional_lambda(uncond, y);
        rows.push_back(EvalRow{x, y, lc, lu, lc / lu});
    }
    return rows;
}

bool CheckReport::all_passed() const {
    return std::all_of(items.begin(), items.end(),
                       [](const CheckItem& item) { return item.passed; });
}

CheckReport run_check(const Dataset& ds, std::span<const double> probes,
                      std::optional<double> ridge) {
    CheckReport report;
    report.warnings = ds.bags.empty() ? std::vector<std::string>{} : dataset_warnings(ds);

    try {
        validate_dataset(ds);
        report.items.push_back({"dataset validation", true,
                                std::to_string(ds.bags.size()) + " bags, d_x = " +
                                    std::to_string(ds.x_spec.degree) + ", d_y = " +
                                    std::to_string(ds.y_spec.degree)});
    } catch (const ValidationError& e) {
        report.items.push_back({"dataset validation", false, e.what()});
        return report;
    }

    std::size_t min_n = ds.bags.front().xs.size();
    for (const Bag& bag : ds.bags) min_n = std::min(min_n, bag.xs.size());
    const double rx = ds.x_spec.degree / static_cast<double>(min_n);
    const double ry = ds.y_spec.degree / static_cast<double>(ds.bags.size());
    report.items.push_back({"overfit ratio d_x/N", rx <= 0.2, describe(rx)});
    report.items.push_back({"overfit ratio d_y/M", ry <= 0.2, describe(ry)});

    // Per-bag factorizations; failures are reported bag by bag.
    std::vector<std::string> failed;
    double worst_condition = 1.0;
    for (const Bag& bag : ds.bags) {
        try {
            const BagEvaluator ev = bag_evaluator(bag, ds.x_spec, ridge);
            worst_condition = std::max(worst_condition, ev.state.condition_estimate);
        } catch (const InsufficientRank& e) {
            failed.push_back(e.what());
        }
    }
    if (failed.empty()) {
        report.items.push_back({"per-bag Gram factorization", true,
                                "worst condition estimate " + describe(worst_condition)});
    } else {
        std::string detail = "InsufficientRank: " + failed.front();
        if (failed.size() > 1)
            detail += " (and " + std::to_string(failed.size() - 1) + " more)";
        report.items.push_back({"per-bag Gram factorization", false, detail});
        return report;
    }

    const TwoStepModel model(ds, ridge);
    std::vector<double> ys;
    ys.reserve(ds.bags.size());
    for (const Bag& bag : ds.bags) ys.push_back(bag.y);

    try {
        const ConditionalModel uncond = model.unconditional();
        const QuadratureRule rule = outcome_rule(uncond);
        double mass = 0.0;
        for (double w : rule.weights) mass += w;
        const double gap = rel_gap(mass, static_cast<double>(ds.bags.size()));
        report.items.push_back({"unconditional mass identity", gap <= kMassTol,
                                "sum lambda(y_i) = " + describe(mass) + ", M = " +
                                    std::to_string(ds.bags.size()) + ", rel " + describe(gap)});

        const GramMatrix direct = gram_direct(ds.y_spec, ys);
        const double ggap = matrix_gap(uncond.gram.entries, direct.entries);
        report.items.push_back({"unconditional Gram, moments vs direct", ggap <= kGramTol,
                                "max rel entry gap " + describe(ggap)});

        // Reproducing property of the unconditional kernel on the outcomes.
        double worst = 0.0;
        const std::vector<double> zs = default_grid(ds, 5);
        for (double z : zs) {
            std::vector<double> qz = eval_basis(ds.y_spec, z);
            for (int k = 0; k < ds.y_spec.degree; ++k) {
                double lhs = 0.0;
                for (double yl : ys) {
                    const std::vector<double> ql = eval_basis(ds.y_spec, yl);
                    lhs += kernel(uncond.state, z, yl) * ql[static_cast<std::size_t>(k)];
                }
                const double rhs = qz[static_cast<std::size_t>(k)];
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
        }
        report.items.push_back({"reproducing property", worst <= kReproducingTol,
                                "max rel residual " + describe(worst)});
    } catch (const std::exception& e) {
        report.items.push_back({"unconditional checks", false, e.what()});
    }

    for (double x : probes) {
        const std::string tag = " at x = " + describe(x);
        try {
            const ConditionalModel cond = model.conditional(x);
            const QuadratureRule rule = outcome_rule(cond);
            double mass = 0.0;
            for (double w : rule.weights) mass += w;
            double total = 0.0;
            for (double w : cond.weights) total += w;
            const double gap = rel_gap(mass, total);
            report.items.push_back({"conditional mass identity" + tag, gap <= kMassTol,
                                    "rel " + describe(gap) + ", condition estimate " +
                                        describe(cond.state.condition_estimate)});
            const GramMatrix direct = gram_direct(ds.y_spec, ys, cond.weights);
            const double ggap = matrix_gap(cond.gram.entries, direct.entries);
            report.items.push_back({"conditional Gram, moments vs direct" + tag,
                                    ggap <= kGramTol, "max rel entry gap " + describe(ggap)});
        } catch (const std::exception& e) {
            report.items.push_back({"conditional checks" + tag, false, e.what()});
        }
    }
    return report;
}

std::string format_report(const CheckReport& report) {
    std::ostringstream out;
    for (const std::string& w : report.warnings) out << "[WARN] " << w << '\n';
    for (const CheckItem& item : report.items)
        out << (item.passed ? "[PASS] " : "[FAIL] ") << item.name << ": " << item.detail << '\n';
    out << (report.all_passed() ? "all checks passed" : "some checks FAILED") << '\n';
    return out.str();
}

}  // namespace distreg
