#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace protozoa::cli {

struct RunRow {
    std::uint64_t seed = 0;
    double best_fit = 0.0;
    double seconds = 0.0;
};

/// One (function, mode) line of a bench artifact.
struct BenchRecord {
    std::string function;
    std::uint64_t ps = 0;
    std::uint64_t dim = 0;
    std::uint64_t iters = 0;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    std::string mode;  // "seq" | "par"
    unsigned workers = 1;
    double avg_best_fit = 0.0;
    double avg_seconds = 0.0;
    std::vector<RunRow> per_run;
};

/// Artifact could not be read or parsed.
class RecordError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 6 significant digits; scientific (mantissa zeros stripped) for |v| >= 1e6 or 0 < |v| < 1e-3.
std::string format_number(double v);

/// Fixed two decimals, as in the speedup column.
std::string format_ratio(double v);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_runs_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_json(std::ostream& out, const std::vector<BenchRecord>& records);

std::vector<BenchRecord> read_csv(std::istream& in, const std::string& origin);
std::vector<BenchRecord> read_json(std::istream& in, const std::string& origin);

/// Picks the reader from the extension (.json, anything else is CSV).
std::vector<BenchRecord> read_records(const std::filesystem::path& path);

/// Writes via a sibling temporary and renames; throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace protozoa::cli
