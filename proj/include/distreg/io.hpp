#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distreg/dist_reg.hpp"

namespace distreg {

enum class FileFormat { Jsonl, Csv };

FileFormat format_from_name(std::string_view name);  // "jsonl" | "csv"
std::optional<FileFormat> format_from_extension(std::string_view path);

/// JSONL: one {"bag_id": ..., "y": ..., "x": [...]} object per line.
/// CSV long form: header `bag_id,y,x`, one x-observation per row; rows of a
/// bag are contiguous and share y. Parse errors carry the 1-based line.
std::vector<Bag> read_bags(std::istream& in, FileFormat format);
std::vector<Bag> load_bags(const std::string& path, FileFormat format);

/// Doubles are written shortest-round-trip, so write-then-load reproduces
/// bags bit-exactly in both formats.
void write_bags(std::ostream& out, std::span<const Bag> bags, FileFormat format);
void save_bags(const std::string& path, std::span<const Bag> bags, FileFormat format);

/// load_bags + make_dataset: domain maps fitted from the pooled x and from y,
/// bag order = file order.
Dataset load_dataset(const std::string& path, FileFormat format,
                     BasisFamily family, int dx, int dy);

/// Shortest round-trip decimal form of a double (also used by the CLI).
std::string format_double(double v);

/// `n` evenly spaced points across the dataset's outcome range.
std::vector<double> default_grid(const Dataset& ds, int n);

struct EvalRow {
    double x;
    double y;
    double lambda_cond;
    double lambda_uncond;
    double ratio;
};

/// One row per grid point: lambda(y|x), lambda(y) and their ratio.
std::vector<EvalRow> run_eval_grid(const TwoStepModel& model, double x,
                                   std::span<const double> grid);

struct CheckItem {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CheckReport {
    std::vector<CheckItem> items;
    std::vector<std::string> warnings;
    bool all_passed() const;
};

/// Diagnostics: per-bag Gram condition estimates, overfit ratios, and the
/// invariant suite (mass identities, moments-vs-direct Gram, reproducing
/// property) at the given x probes. Failures are report content, not errors.
CheckReport run_check(const Dataset& ds, std::span<const double> probes,
                      std::optional<double> ridge = {});

std::string format_report(const CheckReport& report);

}  // namespace distreg
