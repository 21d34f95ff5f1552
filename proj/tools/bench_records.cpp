#include "bench_records.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace protozoa::cli {

namespace {

constexpr const char* kCsvHeader =
    "function,ps,dim,iters,runs,seed,mode,workers,avg_best_fit,avg_seconds";

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        throw RecordError(where + ": expected an integer, got '" + s + "'");
    }
    if (used != s.size()) {
        throw RecordError(where + ": expected an integer, got '" + s + "'");
    }
    return v;
}

double to_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw RecordError(where + ": expected a number, got '" + s + "'");
    }
    if (used != s.size()) {
        throw RecordError(where + ": expected a number, got '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    const double a = std::fabs(v);
    char buf[64];
    if (v != 0.0 && (a >= 1.0e6 || a < 1.0e-3)) {
        std::snprintf(buf, sizeof buf, "%.5E", v);
        std::string s(buf);
        const auto e = s.find('E');
        std::string mantissa = s.substr(0, e);
        if (mantissa.find('.') != std::string::npos) {
            while (mantissa.back() == '0') {
                mantissa.pop_back();
            }
            if (mantissa.back() == '.') {
                mantissa.pop_back();
            }
        }
        return mantissa + s.substr(e);
    }
    std::snprintf(buf, sizeof buf, "%.6G", v);
    return buf;
}

std::string format_ratio(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.function << ',' << r.ps << ',' << r.dim << ',' << r.iters << ',' << r.runs << ','
            << r.seed << ',' << r.mode << ',' << r.workers << ',' << format_number(r.avg_best_fit)
            << ',' << format_number(r.avg_seconds) << '\n';
    }
}

void write_runs_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "function,mode,seed,best_fit,seconds\n";
    for (const auto& r : records) {
        for (const auto& row : r.per_run) {
            out << r.function << ',' << r.mode << ',' << row.seed << ','
                << format_number(row.best_fit) << ',' << format_number(row.seconds) << '\n';
        }
    }
}

void write_json(std::ostream& out, const std::vector<BenchRecord>& records) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json runs = nlohmann::ordered_json::array();
        for (const auto& row : r.per_run) {
            runs.push_back({{"seed", row.seed}, {"best_fit", row.best_fit}, {"seconds", row.seconds}});
        }
        doc.push_back({{"function", r.function},
                       {"ps", r.ps},
                       {"dim", r.dim},
                       {"iters", r.iters},
                       {"runs", r.runs},
                       {"seed", r.seed},
                       {"mode", r.mode},
                       {"workers", r.workers},
                       {"avg_best_fit", r.avg_best_fit},
                       {"avg_seconds", r.avg_seconds},
                       {"per_run", runs}});
    }
    out << doc.dump(2) << '\n';
}

std::vector<BenchRecord> read_csv(std::istream& in, const std::string& origin) {
    std::vector<BenchRecord> records;
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw RecordError(origin + ": missing or unexpected CSV header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(line_no);
        const auto f = split(line, ',');
        if (f.size() != 10) {
            throw RecordError(where + ": expected 10 fields, found " + std::to_string(f.size()));
        }
        BenchRecord r;
        r.function = f[0];
        r.ps = to_u64(f[1], where);
        r.dim = to_u64(f[2], where);
        r.iters = to_u64(f[3], where);
        r.runs = to_u64(f[4], where);
        r.seed = to_u64(f[5], where);
        r.mode = f[6];
        r.workers = static_cast<unsigned>(to_u64(f[7], where));
        r.avg_best_fit = to_double(f[8], where);
        r.avg_seconds = to_double(f[9], where);
        if (r.mode != "seq" && r.mode != "par") {
            throw RecordError(where + ": mode must be seq or par");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<BenchRecord> read_json(std::istream& in, const std::string& origin) {
    std::vector<BenchRecord> records;
    try {
        const auto doc = nlohmann::json::parse(in);
        for (const auto& j : doc) {
            BenchRecord r;
            r.function = j.at("function").get<std::string>();
            r.ps = j.at("ps").get<std::uint64_t>();
            r.dim = j.at("dim").get<std::uint64_t>();
            r.iters = j.at("iters").get<std::uint64_t>();
            r.runs = j.at("runs").get<std::uint64_t>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.mode = j.at("mode").get<std::string>();
            r.workers = j.at("workers").get<unsigned>();
            r.avg_best_fit = j.at("avg_best_fit").get<double>();
            r.avg_seconds = j.at("avg_seconds").get<double>();
            if (j.contains("per_run")) {
                for (const auto& row : j.at("per_run")) {
                    r.per_run.push_back({row.at("seed").get<std::uint64_t>(),
                                         row.at("best_fit").get<double>(),
                                         row.at("seconds").get<double>()});
                }
            }
            if (r.mode != "seq" && r.mode != "par") {
                throw RecordError(origin + ": mode must be seq or par");
            }
            records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw RecordError(origin + ": " + e.what());
    }
    return records;
}

std::vector<BenchRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    if (path.extension() == ".json") {
        return read_json(in, path.string());
    }
    return read_csv(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << contents;
        if (!out.flush()) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw std::runtime_error("cannot rename to " + path.string() + ": " + ec.message());
    }
}

}  // namespace protozoa::cli
