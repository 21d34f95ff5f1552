#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "protozoa/protozoa.h"

namespace protozoa::cli {

namespace {

struct ConfigDeleter {
    void operator()(pz_config* p) const noexcept { pz_config_destroy(p); }
};
struct ResultDeleter {
    void operator()(pz_result* p) const noexcept { pz_result_destroy(p); }
};
struct ImageDeleter {
    void operator()(pz_image* p) const noexcept { pz_image_destroy(p); }
};
using ConfigPtr = std::unique_ptr<pz_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<pz_result, ResultDeleter>;
using ImagePtr = std::unique_ptr<pz_image, ImageDeleter>;

// Raised inside a command to leave with a specific exit code.
struct Exit {
    int code;
    std::string message;
};

[[noreturn]] void exit_with(int code, std::string message) {
    throw Exit{code, std::move(message)};
}

void check(pz_status status, const char* what) {
    if (status == PZ_OK) {
        return;
    }
    const std::string msg = std::string(what) + ": " + pz_last_error();
    switch (status) {
        case PZ_ERR_INVALID_ARGUMENT:
        case PZ_ERR_CONFIG: exit_with(kExitUsage, msg);
        case PZ_ERR_IO: exit_with(kExitIo, msg);
        case PZ_ERR_PARSE: exit_with(kExitImageParse, msg);
        default: exit_with(kExitCheckFailed, msg);
    }
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("PROTOZOA_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        exit_with(kExitUsage, std::string("PROTOZOA_SEED is not an unsigned integer: ") + env);
    }
    return 0;
}

std::vector<pz_engine> engines_for(const std::string& engine) {
    if (engine == "seq") {
        return {PZ_ENGINE_SEQUENTIAL};
    }
    if (engine == "par") {
        return {PZ_ENGINE_PARALLEL};
    }
    return {PZ_ENGINE_SEQUENTIAL, PZ_ENGINE_PARALLEL};
}

const char* mode_name(pz_engine e) {
    return e == PZ_ENGINE_PARALLEL ? "par" : "seq";
}

struct BenchOptions {
    std::string function;
    std::size_t ps = 1000;
    std::size_t dim = 1000;
    std::uint64_t iters = 1000;
    unsigned runs = 5;
    std::optional<std::uint64_t> seed;
    std::string engine = "both";
    unsigned workers = 0;
    std::size_t np = 1;
    double pf_max = 0.1;
    double lower = -100.0;
    double upper = 100.0;
    std::string out;
    std::string format = "csv";
};

struct ThresholdOptions {
    std::string image;
    std::size_t ps = 100;
    std::uint64_t iters = 50;
    unsigned runs = 5;
    std::optional<std::uint64_t> seed;
    std::string engine = "both";
    unsigned workers = 0;
    std::string emit;
    std::string emit_format = "p5";
    bool self_check = false;
};

struct ReportOptions {
    std::vector<std::string> inputs;
    std::string format = "markdown";
    std::string out;
};

ConfigPtr make_config() {
    pz_config* raw = nullptr;
    check(pz_config_create(&raw), "config");
    return ConfigPtr(raw);
}

int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
    pz_objective id{};
    if (pz_objective_from_name(opt.function.c_str(), &id) != PZ_OK) {
        exit_with(kExitUsage, std::string("unknown function '") + opt.function +
                                  "'; valid ids: " + pz_objective_names());
    }
    const std::uint64_t seed = opt.seed ? *opt.seed : default_seed();

    auto cfg = make_config();
    check(pz_config_set_population(cfg.get(), opt.ps), "--ps");
    check(pz_config_set_dimension(cfg.get(), opt.dim), "--dim");
    check(pz_config_set_max_iterations(cfg.get(), opt.iters), "--iters");
    check(pz_config_set_neighbor_pairs(cfg.get(), opt.np), "--np");
    check(pz_config_set_pf_max(cfg.get(), opt.pf_max), "--pf-max");
    check(pz_config_set_bounds(cfg.get(), opt.lower, opt.upper), "bounds");
    check(pz_config_validate(cfg.get()), "configuration");

    std::vector<BenchRecord> records;
    for (pz_engine engine : engines_for(opt.engine)) {
        BenchRecord rec;
        rec.function = opt.function;
        rec.ps = opt.ps;
        rec.dim = opt.dim;
        rec.iters = opt.iters;
        rec.runs = opt.runs;
        rec.seed = seed;
        rec.mode = mode_name(engine);
        double fit = 0.0;
        double secs = 0.0;
        for (unsigned r = 0; r < opt.runs; ++r) {
            check(pz_config_set_seed(cfg.get(), seed + r), "--seed");
            pz_result* raw = nullptr;
            check(pz_run(cfg.get(), id, engine, opt.workers, &raw), "run");
            ResultPtr result(raw);
            rec.workers = pz_result_workers(result.get());
            RunRow row{seed + r, pz_result_best_fitness(result.get()), pz_result_seconds(result.get())};
            fit += row.best_fit;
            secs += row.seconds;
            rec.per_run.push_back(row);
            err << opt.function << ' ' << rec.mode << " seed=" << row.seed
                << " best=" << format_number(row.best_fit) << " seconds=" << format_number(row.seconds)
                << '\n';
        }
        rec.avg_best_fit = fit / opt.runs;
        rec.avg_seconds = secs / opt.runs;
        records.push_back(std::move(rec));
    }

    std::ostringstream body;
    if (opt.format == "json") {
        write_json(body, records);
    } else {
        write_csv(body, records);
    }
    if (opt.out.empty()) {
        out << body.str();
    } else {
        try {
            write_file_atomic(opt.out, body.str());
            if (opt.format == "csv") {
                std::ostringstream runs;
                write_runs_csv(runs, records);
                write_file_atomic(opt.out + ".runs.csv", runs.str());
            }
        } catch (const std::exception& e) {
            exit_with(kExitIo, e.what());
        }
        out << "wrote " << opt.out << '\n';
    }
    if (records.size() == 2 && records[1].avg_seconds > 0.0) {
        err << "speedup " << format_ratio(records[0].avg_seconds / records[1].avg_seconds) << '\n';
    }
    return kExitOk;
}

int cmd_threshold(const ThresholdOptions& opt, std::ostream& out, std::ostream& err) {
    pz_image* raw_image = nullptr;
    const pz_status loaded = pz_image_load(opt.image.c_str(), &raw_image);
    if (loaded == PZ_ERR_PARSE) {
        exit_with(kExitImageParse, opt.image + ": parse error at byte " +
                                       std::to_string(pz_last_error_offset()) + " (" +
                                       pz_last_error() + ")");
    }
    check(loaded, "image");
    ImagePtr image(raw_image);
    const std::uint64_t seed = opt.seed ? *opt.seed : default_seed();

    auto cfg = make_config();
    check(pz_config_set_population(cfg.get(), opt.ps), "--ps");
    check(pz_config_set_max_iterations(cfg.get(), opt.iters), "--iters");

    int oracle_t = 0;
    double oracle_var = 0.0;
    check(pz_otsu_brute_force(image.get(), &oracle_t, &oracle_var), "oracle");

    struct Summary {
        pz_engine engine;
        double avg_threshold = 0.0;
        double avg_seconds = 0.0;
    };
    std::vector<Summary> summaries;
    int last_threshold = 0;
    bool mismatch = false;
    for (pz_engine engine : engines_for(opt.engine)) {
        Summary s{engine};
        for (unsigned r = 0; r < opt.runs; ++r) {
            check(pz_config_set_seed(cfg.get(), seed + r), "--seed");
            int t = 0;
            double variance = 0.0;
            pz_result* raw = nullptr;
            check(pz_otsu_apo(image.get(), cfg.get(), engine, opt.workers, &t, &variance, &raw),
                  "threshold");
            ResultPtr result(raw);
            const double secs = pz_result_seconds(result.get());
            out << mode_name(engine) << " run " << (r + 1) << " seed " << (seed + r)
                << " threshold " << t << " variance " << format_number(variance) << " seconds "
                << format_number(secs) << '\n';
            s.avg_threshold += t;
            s.avg_seconds += secs;
            last_threshold = t;
            if (variance != oracle_var) {
                mismatch = true;
            }
        }
        s.avg_threshold /= opt.runs;
        s.avg_seconds /= opt.runs;
        summaries.push_back(s);
    }

    const std::string size = std::to_string(pz_image_width(image.get())) + " x " +
                             std::to_string(pz_image_height(image.get()));
    out << "| Size (Px) |";
    for (const auto& s : summaries) {
        out << ' ' << mode_name(s.engine) << " Avg. Best Th. | " << mode_name(s.engine)
            << " Avg. Exe. Time (s) |";
    }
    if (summaries.size() == 2) {
        out << " Speedup |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        out << "---|---|";
    }
    if (summaries.size() == 2) {
        out << "---|";
    }
    out << "\n| " << size << " |";
    for (const auto& s : summaries) {
        out << ' ' << format_ratio(s.avg_threshold) << " | " << format_number(s.avg_seconds) << " |";
    }
    if (summaries.size() == 2) {
        const double speedup =
            summaries[1].avg_seconds > 0.0 ? summaries[0].avg_seconds / summaries[1].avg_seconds : 0.0;
        out << ' ' << format_ratio(speedup) << " |";
    }
    out << '\n';
    out << "oracle threshold " << oracle_t << " variance " << format_number(oracle_var) << '\n';

    if (!opt.emit.empty()) {
        pz_image* raw_bin = nullptr;
        check(pz_image_threshold(image.get(), last_threshold, &raw_bin), "apply threshold");
        ImagePtr binary(raw_bin);
        check(pz_image_save(binary.get(), opt.emit.c_str(),
                            opt.emit_format == "p2" ? PZ_PGM_ASCII : PZ_PGM_BINARY),
              "--emit");
        out << "wrote " << opt.emit << '\n';
    }

    if (opt.self_check) {
        if (mismatch) {
            err << "self-check failed: a run missed the oracle variance " << format_number(oracle_var)
                << '\n';
            return kExitCheckFailed;
        }
        out << "self-check: ok\n";
    }
    return kExitOk;
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
    std::vector<BenchRecord> records;
    for (const auto& path : opt.inputs) {
        std::error_code ec;
        if (!std::filesystem::exists(path, ec)) {
            exit_with(kExitIo, "cannot open " + path);
        }
        try {
            auto batch = read_records(path);
            records.insert(records.end(), batch.begin(), batch.end());
        } catch (const RecordError& e) {
            exit_with(kExitUsage, e.what());
        } catch (const std::exception& e) {
            exit_with(kExitIo, e.what());
        }
    }

    std::vector<std::string> unmatched;
    std::vector<ReportRow> rows;
    try {
        rows = join_records(records, unmatched);
    } catch (const ConflictError& e) {
        exit_with(kExitUsage, e.what());
    }
    for (const auto& u : unmatched) {
        err << "unmatched: " << u << '\n';
    }

    std::ostringstream body;
    if (opt.format == "csv") {
        write_report_csv(body, rows);
    } else {
        write_report_markdown(body, rows);
    }
    if (opt.out.empty()) {
        out << body.str();
    } else {
        try {
            write_file_atomic(opt.out, body.str());
        } catch (const std::exception& e) {
            exit_with(kExitIo, e.what());
        }
        out << "wrote " << opt.out << '\n';
    }
    return kExitOk;
}

}  // namespace

std::vector<ReportRow> join_records(const std::vector<BenchRecord>& records,
                                    std::vector<std::string>& unmatched) {
    using Key = std::tuple<std::string, std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;
    struct Slot {
        std::optional<BenchRecord> seq;
        std::optional<BenchRecord> par;
    };
    std::vector<Key> order;
    std::map<Key, Slot> slots;
    for (const auto& r : records) {
        const Key key{r.function, r.ps, r.dim, r.iters, r.seed};
        auto [it, inserted] = slots.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        auto& target = r.mode == "seq" ? it->second.seq : it->second.par;
        if (target) {
            throw ConflictError("duplicate " + r.mode + " record for " + r.function + " ps=" +
                                std::to_string(r.ps) + " seed=" + std::to_string(r.seed));
        }
        target = r;
    }

    std::vector<ReportRow> rows;
    for (const auto& key : order) {
        const auto& slot = slots.at(key);
        const auto& [function, ps, dim, iters, seed] = key;
        const std::string label = function + " ps=" + std::to_string(ps) + " dim=" +
                                  std::to_string(dim) + " iters=" + std::to_string(iters) +
                                  " seed=" + std::to_string(seed);
        if (!slot.seq || !slot.par) {
            unmatched.push_back(label + (slot.seq ? " (seq only)" : " (par only)"));
            continue;
        }
        if (slot.seq->runs != slot.par->runs) {
            throw ConflictError("conflicting configs for " + label + ": runs " +
                                std::to_string(slot.seq->runs) + " vs " +
                                std::to_string(slot.par->runs));
        }
        ReportRow row{function, ps, dim, iters, seed, *slot.seq, *slot.par, 0.0};
        row.speedup = slot.par->avg_seconds > 0.0 ? slot.seq->avg_seconds / slot.par->avg_seconds
                                                  : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report_markdown(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "| No. | Function | PS | Seq Fit | Seq Time | Par Fit | Par Time | Speedup |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    std::size_t n = 0;
    for (const auto& r : rows) {
        out << "| " << ++n << " | " << r.function << " | " << r.ps << " | "
            << format_number(r.seq.avg_best_fit) << " | " << format_number(r.seq.avg_seconds)
            << " | " << format_number(r.par.avg_best_fit) << " | "
            << format_number(r.par.avg_seconds) << " | " << format_ratio(r.speedup) << " |\n";
    }
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "no,function,ps,dim,iters,seed,seq_fit,seq_time,par_fit,par_time,speedup\n";
    std::size_t n = 0;
    for (const auto& r : rows) {
        out << ++n << ',' << r.function << ',' << r.ps << ',' << r.dim << ',' << r.iters << ','
            << r.seed << ',' << format_number(r.seq.avg_best_fit) << ','
            << format_number(r.seq.avg_seconds) << ',' << format_number(r.par.avg_best_fit) << ','
            << format_number(r.par.avg_seconds) << ',' << format_ratio(r.speedup) << '\n';
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Artificial Protozoa Optimizer: benchmarks, thresholding and speedup reports",
                 "protozoa"};
    app.require_subcommand(1);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark function in one or both engines");
    bench_cmd->add_option("--function", bench.function, "Function id")->required();
    bench_cmd->add_option("--ps", bench.ps, "Population size")->capture_default_str();
    bench_cmd->add_option("--dim", bench.dim, "Dimension")->capture_default_str();
    bench_cmd->add_option("--iters", bench.iters, "Iterations")->capture_default_str();
    bench_cmd->add_option("--runs", bench.runs, "Runs per engine (seeds seed..seed+runs-1)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "Base seed (default: $PROTOZOA_SEED or 0)");
    bench_cmd->add_option("--engine", bench.engine, "seq, par or both")
        ->check(CLI::IsMember({"seq", "par", "both"}))
        ->capture_default_str();
    bench_cmd->add_option("--workers", bench.workers, "Parallel workers (0 = hardware)")
        ->capture_default_str();
    bench_cmd->add_option("--np", bench.np, "Neighbour pairs")->capture_default_str();
    bench_cmd->add_option("--pf-max", bench.pf_max, "Maximum proportion fraction")
        ->capture_default_str();
    bench_cmd->add_option("--lower", bench.lower, "Lower bound")->capture_default_str();
    bench_cmd->add_option("--upper", bench.upper, "Upper bound")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Output path (stdout when omitted)");
    bench_cmd->add_option("--format", bench.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    ThresholdOptions thr;
    auto* thr_cmd = app.add_subcommand("threshold", "Otsu thresholding of a PGM/PPM image");
    thr_cmd->add_option("--image", thr.image, "Input PGM/PPM")->required();
    thr_cmd->add_option("--ps", thr.ps, "Population size")->capture_default_str();
    thr_cmd->add_option("--iters", thr.iters, "Iterations")->capture_default_str();
    thr_cmd->add_option("--runs", thr.runs, "Runs per engine")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    thr_cmd->add_option("--seed", thr.seed, "Base seed (default: $PROTOZOA_SEED or 0)");
    thr_cmd->add_option("--engine", thr.engine, "seq, par or both")
        ->check(CLI::IsMember({"seq", "par", "both"}))
        ->capture_default_str();
    thr_cmd->add_option("--workers", thr.workers, "Parallel workers (0 = hardware)")
        ->capture_default_str();
    thr_cmd->add_option("--emit", thr.emit, "Write the binarised image of the last run");
    thr_cmd->add_option("--emit-format", thr.emit_format, "p2 or p5")
        ->check(CLI::IsMember({"p2", "p5"}))
        ->capture_default_str();
    thr_cmd->add_flag("--self-check", thr.self_check,
                      "Fail unless every run reaches the exhaustive-search variance");

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand("report", "Join seq/par bench records into a speedup table");
    rep_cmd->add_option("--in", rep.inputs, "Bench CSV/JSON files")->required();
    rep_cmd->add_option("--format", rep.format, "markdown or csv")
        ->check(CLI::IsMember({"markdown", "csv"}))
        ->capture_default_str();
    rep_cmd->add_option("--out", rep.out, "Output path (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        const CLI::App* scope = &app;
        for (const auto* sub : app.get_subcommands()) {
            scope = sub;
        }
        err << scope->help();
        return kExitUsage;
    }

    try {
        if (bench_cmd->parsed()) {
            return cmd_bench(bench, out, err);
        }
        if (thr_cmd->parsed()) {
            return cmd_threshold(thr, out, err);
        }
        return cmd_report(rep, out, err);
    } catch (const Exit& e) {
        err << e.message << '\n';
        return e.code;
    }
}

}  // namespace protozoa::cli
