#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

using namespace protozoa::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("protozoa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& contents) const {
        std::ofstream(dir_ / name, std::ios::binary) << contents;
        return path(name);
    }

    fs::path dir_;
};

const std::string kFixtures = PROTOZOA_FIXTURE_DIR;

}  // namespace

TEST(FormatNumber, TableStyle) {
    EXPECT_EQ(format_number(9.01e8), "9.01E+08");
    EXPECT_EQ(format_number(0.924789), "0.924789");
    EXPECT_EQ(format_number(806290), "806290");
    EXPECT_EQ(format_number(40864.2), "40864.2");
    EXPECT_EQ(format_number(1e6), "1E+06");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(1.5e-4), "1.5E-04");
    EXPECT_EQ(format_number(-2.5), "-2.5");
    EXPECT_EQ(format_ratio(430.0 / 64.0), "6.72");
}

TEST_F(CliTest, BenchBothEnginesAgree) {
    const auto csv = path("sphere.csv");
    const auto r = cli({"bench", "--function", "sphere", "--ps", "20", "--dim", "4", "--iters", "30",
                        "--runs", "2", "--engine", "both", "--workers", "3", "--out", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(csv));
    const auto records = read_csv(in, csv);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].mode, "seq");
    EXPECT_EQ(records[1].mode, "par");
    EXPECT_EQ(records[1].workers, 3u);
    EXPECT_EQ(records[0].avg_best_fit, records[1].avg_best_fit);

    const auto runs = slurp(csv + ".runs.csv");
    EXPECT_EQ(runs.rfind("function,mode,seed,best_fit,seconds\n", 0), 0u);
    EXPECT_EQ(std::count(runs.begin(), runs.end(), '\n'), 5);
}

TEST_F(CliTest, BenchJsonCarriesPerRunRows) {
    const auto out = path("g.json");
    const auto r = cli({"bench", "--function", "griewank", "--ps", "8", "--dim", "3", "--iters", "5",
                        "--runs", "3", "--seed", "40", "--engine", "par", "--format", "json",
                        "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(slurp(out));
    ASSERT_EQ(doc.size(), 1u);
    ASSERT_EQ(doc[0]["per_run"].size(), 3u);
    EXPECT_EQ(doc[0]["per_run"][2]["seed"], 42);
    double sum = 0;
    for (const auto& row : doc[0]["per_run"]) sum += row["best_fit"].get<double>();
    EXPECT_NEAR(doc[0]["avg_best_fit"].get<double>(), sum / 3, 1e-12 * (1 + sum));
}

TEST_F(CliTest, BenchIsByteStableApartFromTimings) {
    auto fits = [&](const std::string& name) {
        const auto p = path(name);
        EXPECT_EQ(cli({"bench", "--function", "rosenbrock", "--ps", "10", "--dim", "3", "--iters",
                       "10", "--runs", "2", "--engine", "seq", "--out", p})
                      .code,
                  0);
        std::istringstream in(slurp(p));
        return read_csv(in, p)[0].avg_best_fit;
    };
    EXPECT_EQ(fits("a.csv"), fits("b.csv"));
}

TEST_F(CliTest, UsageErrors) {
    auto r = cli({"bench", "--function", "nope", "--ps", "4"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("sphere"), std::string::npos);
    EXPECT_EQ(cli({"bench", "--ps", "4"}).code, kExitUsage);
    EXPECT_EQ(cli({"bench", "--function", "sphere", "--ps", "abc"}).code, kExitUsage);
    EXPECT_EQ(cli({"bench", "--function", "sphere", "--ps", "4", "--np", "9", "--dim", "2",
                   "--iters", "1", "--runs", "1"})
                  .code,
              kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({}).code, kExitUsage);
}

TEST_F(CliTest, IoErrors) {
    EXPECT_EQ(cli({"bench", "--function", "sphere", "--ps", "4", "--dim", "2", "--iters", "1",
                   "--runs", "1", "--out", "/nonexistent/dir/x.csv"})
                  .code,
              kExitIo);
    EXPECT_EQ(cli({"threshold", "--image", path("missing.pgm")}).code, kExitIo);
    EXPECT_EQ(cli({"report", "--in", path("missing.csv")}).code, kExitIo);
    EXPECT_FALSE(fs::exists("/nonexistent/dir/x.csv.tmp"));
}

TEST_F(CliTest, ThresholdSelfCheckAndEmit) {
    std::string pgm = "P2 8 2 255\n";
    for (int i = 0; i < 16; ++i) pgm += (i % 3 == 0 ? "200 " : "40 ");
    const auto img = write("spikes.pgm", pgm);
    const auto emitted = path("bw.pgm");
    const auto r = cli({"threshold", "--image", img, "--ps", "30", "--iters", "20", "--runs", "3",
                        "--engine", "both", "--self-check", "--emit", emitted, "--emit-format", "p5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("self-check: ok"), std::string::npos);
    EXPECT_NE(r.out.find("Avg. Best Th."), std::string::npos);
    EXPECT_NE(r.out.find("oracle threshold 40"), std::string::npos);
    const auto bw = slurp(emitted);
    EXPECT_EQ(bw.rfind("P5\n8 2\n255\n", 0), 0u);
    for (std::size_t i = 11; i < bw.size(); ++i) {
        EXPECT_TRUE(bw[i] == '\0' || bw[i] == '\xff');
    }
}

TEST_F(CliTest, ThresholdParseErrorReportsOffset) {
    const auto img = write("bad.pgm", "P2 2 1 999 0 0");
    const auto r = cli({"threshold", "--image", img});
    EXPECT_EQ(r.code, kExitImageParse);
    EXPECT_NE(r.err.find("byte 7"), std::string::npos) << r.err;
}

TEST_F(CliTest, ReportSimpleRatios) {
    const std::string hdr = "function,ps,dim,iters,runs,seed,mode,workers,avg_best_fit,avg_seconds\n";
    const auto f = write("r.csv", hdr + "sphere,10,2,5,1,0,seq,1,1.5,10\nsphere,10,2,5,1,0,par,4,1.5,2\n"
                                        "griewank,10,2,5,1,0,seq,1,0.5,3\ngriewank,10,2,5,1,0,par,4,0.5,3\n");
    const auto r = cli({"report", "--in", f});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| 1 | sphere | 10 | 1.5 | 10 | 1.5 | 2 | 5.00 |"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("| 2 | griewank | 10 | 0.5 | 3 | 0.5 | 3 | 1.00 |"), std::string::npos);
}

TEST_F(CliTest, ReportReproducesPrintedTable) {
    const auto r = cli({"report", "--in", kFixtures + "/reference_seq.csv", kFixtures + "/reference_par.csv",
                        "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream expected(slurp(kFixtures + "/reference_speedups.csv"));
    std::string line;
    std::getline(expected, line);
    int checked = 0;
    while (std::getline(expected, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        const std::string fn = line.substr(0, c1);
        const std::string ps = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string speedup = line.substr(c2 + 1);
        std::istringstream rows(r.out);
        std::string row;
        bool found = false;
        while (std::getline(rows, row)) {
            if (row.find("," + fn + "," + ps + ",") != std::string::npos) {
                found = true;
                EXPECT_EQ(row.substr(row.rfind(',') + 1), speedup) << row;
            }
        }
        EXPECT_TRUE(found) << fn << " " << ps;
        ++checked;
    }
    EXPECT_EQ(checked, 20);
    EXPECT_NE(r.out.find(",hgbat,2000,1000,1000,0,1.47E+07,430,1.43E+07,64,6.72"), std::string::npos)
        << r.out;
}

TEST_F(CliTest, ReportPartialAndConflicts) {
    const std::string hdr = "function,ps,dim,iters,runs,seed,mode,workers,avg_best_fit,avg_seconds\n";
    const auto partial = write("p.csv", hdr + "sphere,10,2,5,1,0,seq,1,1,10\nsphere,10,2,5,1,0,par,2,1,5\n"
                                              "hgbat,10,2,5,1,0,seq,1,1,10\n");
    auto r = cli({"report", "--in", partial});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("unmatched"), std::string::npos);
    EXPECT_NE(r.out.find("2.00"), std::string::npos);

    const auto conflict = write("c.csv", hdr + "sphere,10,2,5,1,0,seq,1,1,10\nsphere,10,2,5,3,0,par,2,1,5\n");
    EXPECT_EQ(cli({"report", "--in", conflict}).code, kExitUsage);
    const auto dup = write("d.csv", hdr + "sphere,10,2,5,1,0,seq,1,1,10\nsphere,10,2,5,1,0,seq,1,1,9\n");
    EXPECT_EQ(cli({"report", "--in", dup}).code, kExitUsage);
    const auto garbage = write("g.csv", "not,a,bench,file\n");
    EXPECT_EQ(cli({"report", "--in", garbage}).code, kExitUsage);
}

TEST_F(CliTest, ReportOutputIsByteStable) {
    const auto a = path("a.md");
    const auto b = path("b.md");
    ASSERT_EQ(cli({"report", "--in", kFixtures + "/reference_seq.csv", kFixtures + "/reference_par.csv",
                   "--out", a})
                  .code,
              0);
    ASSERT_EQ(cli({"report", "--in", kFixtures + "/reference_seq.csv", kFixtures + "/reference_par.csv",
                   "--out", b})
                  .code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).rfind("| No. | Function | PS | Seq Fit | Seq Time | Par Fit | Par Time | Speedup |\n", 0),
              0u);
    EXPECT_EQ(slurp(a).find('\r'), std::string::npos);
}

TEST_F(CliTest, ReportReadsJsonInput) {
    const auto j = path("both.json");
    ASSERT_EQ(cli({"bench", "--function", "sphere", "--ps", "6", "--dim", "2", "--iters", "3",
                   "--runs", "1", "--format", "json", "--out", j})
                  .code,
              0);
    const auto r = cli({"report", "--in", j});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| 1 | sphere | 6 |"), std::string::npos) << r.out;
}
