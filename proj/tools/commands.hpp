#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bench_records.hpp"

namespace protozoa::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitImageParse = 4;

/// Entry point shared by main() and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ReportRow {
    std::string function;
    std::uint64_t ps = 0;
    std::uint64_t dim = 0;
    std::uint64_t iters = 0;
    std::uint64_t seed = 0;
    BenchRecord seq;
    BenchRecord par;
    double speedup = 0.0;
};

/// Seq and par records with the same (function, ps, dim, iters, seed) disagree on runs, or repeat.
class ConflictError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pairs seq/par records in first-seen order. Unpaired records are described in `unmatched`.
std::vector<ReportRow> join_records(const std::vector<BenchRecord>& records,
                                    std::vector<std::string>& unmatched);

void write_report_markdown(std::ostream& out, const std::vector<ReportRow>& rows);
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace protozoa::cli
