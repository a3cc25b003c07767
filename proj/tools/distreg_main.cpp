#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "distreg/errors.hpp"
#include "distreg/io.hpp"
#include "distreg/synth.hpp"

namespace {

using namespace distreg;

struct ModelOptions {
    std::string input;
    std::string format;
    std::string basis = "chebyshev";
    int dx = 10;
    int dy = 10;
    std::optional<double> ridge;
};

void add_model_options(CLI::App& sub, ModelOptions& opts) {
    sub.add_option("--input", opts.input, "dataset file")->required();
    sub.add_option("--format", opts.format, "dataset format (jsonl|csv); default from extension");
    sub.add_option("--dx", opts.dx, "x basis degree")->capture_default_str();
    sub.add_option("--dy", opts.dy, "y basis degree")->capture_default_str();
    sub.add_option("--basis", opts.basis, "chebyshev|legendre|hermite|laguerre")
        ->capture_default_str();
    sub.add_option("--ridge", opts.ridge,
                   "relative ridge added to Gram diagonals (opt-in regularization)");
}

FileFormat resolve_format(const std::string& flag, const std::string& path) {
    if (!flag.empty()) return format_from_name(flag);
    if (auto fmt = format_from_extension(path)) return *fmt;
    return FileFormat::Jsonl;
}

Dataset load(const ModelOptions& opts) {
    return load_dataset(opts.input, resolve_format(opts.format, opts.input),
                        family_from_name(opts.basis), opts.dx, opts.dy);
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw ParseError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void print_warnings(const TwoStepModel& model) {
    for (const std::string& w : model.warnings()) std::cerr << "warning: " << w << '\n';
}

int run_synth(int M, int N, double R, std::uint64_t seed, const std::string& output,
              const std::string& format) {
    SynthConfig cfg;
    cfg.bag_count = M;
    cfg.observations_per_bag = N;
    cfg.noise_half_width = R;
    cfg.seed = seed;
    const std::vector<Bag> bags = generate(cfg);
    const FileFormat fmt = resolve_format(format, output);
    if (output.empty() || output == "-")
        write_bags(std::cout, bags, fmt);
    else
        save_bags(output, bags, fmt);
    std::cerr << "synth: generator=splitmix64 seed=" << seed << " M=" << M << " N=" << N
              << " R=" << format_double(R) << '\n';
    return 0;
}

int run_eval(const ModelOptions& opts, const std::vector<double>& xs, int grid_n,
             const std::string& output) {
    const TwoStepModel model(load(opts), opts.ridge);
    print_warnings(model);
    const std::vector<double> grid = default_grid(model.dataset(), grid_n);
    OutputStream out(output);
    out.get() << "x,y,lambda_cond,lambda_uncond,ratio\n";
    for (double x : xs) {
        for (const EvalRow& row : run_eval_grid(model, x, grid)) {
            out.get() << format_double(row.x) << ',' << format_double(row.y) << ','
                      << format_double(row.lambda_cond) << ','
                      << format_double(row.lambda_uncond) << ',' << format_double(row.ratio)
                      << '\n';
        }
    }
    return 0;
}

int run_quad(const ModelOptions& opts, const std::vector<double>& xs,
             const std::string& output) {
    const TwoStepModel model(load(opts), opts.ridge);
    print_warnings(model);
    OutputStream out(output);
    out.get() << "x,node,weight,probability\n";
    for (double x : xs) {
        const QuadratureRule rule = outcome_rule(model.conditional(x));
        const OutcomeDistribution dist = normalize(rule);
        for (std::size_t i = 0; i < dist.nodes.size(); ++i) {
            out.get() << format_double(x) << ',' << format_double(dist.nodes[i]) << ','
                      << format_double(rule.weights[i]) << ','
                      << format_double(dist.probabilities[i]) << '\n';
        }
    }
    return 0;
}

int run_uncond(const ModelOptions& opts, int grid_n, const std::string& output) {
    const TwoStepModel model(load(opts), opts.ridge);
    print_warnings(model);
    const ConditionalModel uncond = model.unconditional();
    OutputStream out(output);
    out.get() << "y,lambda_uncond\n";
    for (double y : default_grid(model.dataset(), grid_n)) {
        out.get() << format_double(y) << ',' << format_double(conditional_lambda(uncond, y))
                  << '\n';
    }
    return 0;
}

int run_checks(const ModelOptions& opts, std::vector<double> probes,
               const std::string& output) {
    const Dataset ds = load(opts);
    if (probes.empty()) {
        double lo = ds.bags.front().xs.front();
        double hi = lo;
        for (const Bag& bag : ds.bags)
            for (double x : bag.xs) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        probes = {lo, 0.5 * (lo + hi), hi};
    }
    const CheckReport report = run_check(ds, probes, opts.ridge);
    OutputStream out(output);
    out.get() << format_report(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-step Christoffel-function distribution regression"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark dataset");
    int M = 100;
    int N = 100;
    double R = 0.1;
    std::uint64_t seed = 1;
    std::string synth_output;
    std::string synth_format;
    synth->add_option("--M", M, "number of bags")->capture_default_str();
    synth->add_option("--N", N, "observations per bag")->capture_default_str();
    synth->add_option("--R", R, "noise half-width")->capture_default_str();
    synth->add_option("--seed", seed, "generator seed")->capture_default_str();
    synth->add_option("--output", synth_output, "output path ('-' for stdout)");
    synth->add_option("--format", synth_format, "jsonl|csv; default from extension");

    ModelOptions eval_opts;
    std::vector<double> eval_xs;
    int eval_grid = 201;
    std::string eval_output;
    auto* eval = app.add_subcommand("eval", "lambda(y|x) over a y grid for fixed x");
    add_model_options(*eval, eval_opts);
    eval->add_option("--x", eval_xs, "query point (repeatable)")->required();
    eval->add_option("--grid", eval_grid, "grid points across the y range")
        ->capture_default_str();
    eval->add_option("--output", eval_output, "output path ('-' for stdout)");

    ModelOptions quad_opts;
    std::vector<double> quad_xs;
    std::string quad_output;
    auto* quad = app.add_subcommand("quad", "outcome nodes, weights and probabilities");
    add_model_options(*quad, quad_opts);
    quad->add_option("--x", quad_xs, "query point (repeatable)")->required();
    quad->add_option("--output", quad_output, "output path ('-' for stdout)");

    ModelOptions uncond_opts;
    int uncond_grid = 201;
    std::string uncond_output;
    auto* uncond = app.add_subcommand("uncond", "unconditional lambda(y) over a y grid");
    add_model_options(*uncond, uncond_opts);
    uncond->add_option("--grid", uncond_grid, "grid points across the y range")
        ->capture_default_str();
    uncond->add_option("--output", uncond_output, "output path ('-' for stdout)");

    ModelOptions check_opts;
    std::vector<double> check_xs;
    std::string check_output;
    auto* check = app.add_subcommand("check", "diagnostics and invariant checks");
    add_model_options(*check, check_opts);
    check->add_option("--x", check_xs, "probe point (repeatable); default min/mid/max of x");
    check->add_option("--output", check_output, "output path ('-' for stdout)");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return run_synth(M, N, R, seed, synth_output, synth_format);
        if (eval->parsed()) return run_eval(eval_opts, eval_xs, eval_grid, eval_output);
        if (quad->parsed()) return run_quad(quad_opts, quad_xs, quad_output);
        if (uncond->parsed()) return run_uncond(uncond_opts, uncond_grid, uncond_output);
        if (check->parsed()) return run_checks(check_opts, check_xs, check_output);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const InsufficientRank& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const SingularConditionalGram& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const EigenFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
