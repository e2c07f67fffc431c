#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "support.hpp"

using namespace knnidx;
using namespace knnidx::testing;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("knnidx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        write("path.gr", "p sp 3 4\na 1 2 1\na 2 1 1\na 2 3 1\na 3 2 1\n");
        write("objects.txt", "1\n3\n");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

    std::string read(const std::string& name) const {
        std::ifstream in(path(name));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "knnidx");
        std::vector<const char*> argv;
        for (auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    int build_path_bundle(const std::string& algorithm = "bidirectional") {
        return run({"build", "--graph", path("path.gr"), "--objects", path("objects.txt"), "--k", "2", "--algorithm",
                    algorithm, "--bundle", path("b.knn")});
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, BuildOnPathMatchesWorkedExample) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk) << err_.str();
    EXPECT_NE(out_.str().find("sssp_invocations=0"), std::string::npos);
    auto b = load_bundle(path("b.knn"));
    EXPECT_EQ(to_vector(b.index.list(0)), entries({{0, 0}, {2, 2}}));
    EXPECT_EQ(to_vector(b.index.list(1)), entries({{0, 1}, {2, 1}}));
    EXPECT_EQ(to_vector(b.index.list(2)), entries({{2, 0}, {0, 2}}));
}

TEST_F(CliTest, BottomUpCountsOneSearchPerVertex) {
    ASSERT_EQ(build_path_bundle("bottomup"), cli::kExitOk) << err_.str();
    EXPECT_NE(out_.str().find("sssp_invocations=3"), std::string::npos) << out_.str();
}

TEST_F(CliTest, QuerySingleVertexTouchesOneEntry) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    ASSERT_EQ(run({"query", "--bundle", path("b.knn"), "--vertex", "2", "--k", "1"}), cli::kExitOk) << err_.str();
    EXPECT_NE(out_.str().find("object=1 distance=1\n"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("touched=1"), std::string::npos);
}

TEST_F(CliTest, QueryBenchmarkWritesCsv) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    ASSERT_EQ(run({"query", "--bundle", path("b.knn"), "--count", "100", "--seed", "3", "--csv", path("q.csv")}),
              cli::kExitOk)
        << err_.str();
    const auto csv = read("q.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,density,n,mean_ns,p50_ns,p99_ns,touches");
    EXPECT_NE(out_.str().find("touches_per_query=2"), std::string::npos) << out_.str();
}

TEST_F(CliTest, QueryWithThreads) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    EXPECT_EQ(run({"query", "--bundle", path("b.knn"), "--count", "1000", "--threads", "3"}), cli::kExitOk)
        << err_.str();
}

TEST_F(CliTest, QueryLargerKIsUsageError) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    EXPECT_EQ(run({"query", "--bundle", path("b.knn"), "--vertex", "1", "--k", "3"}), cli::kExitError);
    EXPECT_NE(err_.str().find("rebuild"), std::string::npos);
}

TEST_F(CliTest, UpdateThenVerify) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    write("script.txt", "# move the object\n-1\n+2\n");
    ASSERT_EQ(run({"update", "--bundle", path("b.knn"), "--script", path("script.txt"), "--objects",
                   path("after.txt")}),
              cli::kExitOk)
        << err_.str();
    EXPECT_NE(out_.str().find("operations=2"), std::string::npos);
    EXPECT_EQ(read("after.txt"), "2\n3\n");
    auto b = load_bundle(path("b.knn"));
    EXPECT_EQ(b.flags & kFlagUpdated, kFlagUpdated);
    EXPECT_EQ(to_vector(b.index.list(0)), entries({{1, 1}, {2, 2}}));
    EXPECT_EQ(run({"verify", "--bundle", path("b.knn"), "--graph", path("path.gr"), "--objects", path("after.txt")}),
              cli::kExitOk)
        << out_.str() << err_.str();
}

TEST_F(CliTest, UpdateScriptErrors) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    write("bad.txt", "+1\n");  // already an object
    EXPECT_EQ(run({"update", "--bundle", path("b.knn"), "--script", path("bad.txt")}), cli::kExitError);
    write("bad2.txt", "*2\n");
    EXPECT_EQ(run({"update", "--bundle", path("b.knn"), "--script", path("bad2.txt")}), cli::kExitError);
    EXPECT_NE(err_.str().find("line 1"), std::string::npos);
}

TEST_F(CliTest, VerifyPassesOnFreshBundle) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    EXPECT_EQ(run({"verify", "--bundle", path("b.knn"), "--graph", path("path.gr")}), cli::kExitOk) << out_.str();
    EXPECT_NE(out_.str().find("PASS index"), std::string::npos);
}

TEST_F(CliTest, VerifyFailsOnOtherGraph) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    write("other.gr", "p sp 3 4\na 1 2 1\na 2 1 1\na 2 3 2\na 3 2 2\n");
    EXPECT_EQ(run({"verify", "--bundle", path("b.knn"), "--graph", path("other.gr")}), cli::kExitVerifyFailed);
}

TEST_F(CliTest, VerifyFailsOnCorruptedLists) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    auto b = load_bundle(path("b.knn"));
    b.index.table.assign(1, entries({{0, 1}, {2, 5}}));
    save_bundle(path("b.knn"), b);
    EXPECT_EQ(run({"verify", "--bundle", path("b.knn"), "--graph", path("path.gr")}), cli::kExitVerifyFailed);
    EXPECT_NE(out_.str().find("FAIL index"), std::string::npos);
}

TEST_F(CliTest, VerifyFailsOnObjectMismatch) {
    ASSERT_EQ(build_path_bundle(), cli::kExitOk);
    write("wrong.txt", "2\n");
    EXPECT_EQ(run({"verify", "--bundle", path("b.knn"), "--graph", path("path.gr"), "--objects", path("wrong.txt")}),
              cli::kExitVerifyFailed);
}

TEST_F(CliTest, UsageAndIoErrorsExitOne) {
    EXPECT_EQ(run({}), cli::kExitError);
    EXPECT_EQ(run({"frobnicate"}), cli::kExitError);
    EXPECT_EQ(run({"build", "--bundle", path("x.knn")}), cli::kExitError);  // no graph
    EXPECT_EQ(run({"build", "--graph", path("missing.gr"), "--bundle", path("x.knn")}), cli::kExitError);
    EXPECT_EQ(run({"build", "--graph", path("path.gr"), "--algorithm", "magic"}), cli::kExitError);
    EXPECT_EQ(run({"query", "--bundle", path("missing.knn")}), cli::kExitError);
    EXPECT_EQ(run({"build", "--grid", "3y3"}), cli::kExitError);
    write("bad.gr", "p sp 2 1\na 1 5 1\n");
    EXPECT_EQ(run({"build", "--graph", path("bad.gr")}), cli::kExitError);
    EXPECT_NE(err_.str().find("line 2"), std::string::npos);
}

TEST_F(CliTest, CorruptBundleIsIoErrorNotVerifyFailure) {
    write("junk.knn", "not a bundle at all");
    EXPECT_EQ(run({"verify", "--bundle", path("junk.knn"), "--graph", path("path.gr")}), cli::kExitError);
}

TEST_F(CliTest, BuildFromGeneratedGridWithSampledObjects) {
    ASSERT_EQ(run({"build", "--grid", "12x12", "--seed", "4", "--density", "0.05", "--k", "4", "--bundle",
                   path("g.knn"), "--csv", path("build.csv"), "--eta"}),
              cli::kExitOk)
        << err_.str();
    EXPECT_NE(out_.str().find("objects=7"), std::string::npos) << out_.str();
    const std::string csv = read("build.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_EQ(run({"verify", "--bundle", path("g.knn"), "--grid", "12x12", "--seed", "4"}), cli::kExitOk)
        << out_.str();
}

TEST_F(CliTest, SweepSingleCellIsSingleRow) {
    ASSERT_EQ(run({"sweep", "--experiment", "grid", "--cells", "1", "--rows", "30", "--cols", "30", "--csv",
                   path("grid.csv")}),
              cli::kExitOk)
        << err_.str();
    const auto csv = read("grid.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);  // header + one row
}

TEST_F(CliTest, SweepAllWritesOneCsvPerExperiment) {
    ASSERT_EQ(run({"sweep", "--rows", "20", "--cols", "20", "--cells", "2", "--queries", "200", "--updates", "20",
                   "--csv", path("s")}),
              cli::kExitOk)
        << err_.str();
    for (const char* name : {"k", "density", "grid", "build", "update"})
        EXPECT_TRUE(fs::exists(path(std::string("s_") + name + ".csv"))) << name;
    const auto k_csv = read("s_k.csv");
    EXPECT_EQ(std::count(k_csv.begin(), k_csv.end(), '\n'), 1 + 7);
}

TEST_F(CliTest, SweepRejectsUnknownExperiment) {
    EXPECT_EQ(run({"sweep", "--experiment", "nope"}), cli::kExitError);
}
