#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kData = POCKETFORGE_DATA_DIR;

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        out_ = fs::temp_directory_path() / ("pocketforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(out_);
        fs::create_directories(out_);
    }
    void TearDown() override { fs::remove_all(out_); }

    int run(const std::string& args)
    {
        const std::string cmd = std::string(POCKETFORGE_BIN) + " " + args + " --out " + out_.string() + " > " +
                                (out_ / "stdout.txt").string() + " 2> " + (out_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    json read(const std::string& name) const
    {
        std::ifstream in(out_ / name);
        return json::parse(in);
    }

    json error() const
    {
        std::ifstream in(out_ / "stderr.txt");
        return json::parse(in);
    }

    fs::path out_;
};

std::string data(const std::string& rel) { return (kData / rel).string(); }

} // namespace

TEST_F(Cli, ClassifyRectangleClosed)
{
    ASSERT_EQ(run("classify --pocket " + data("pockets/rectangle.json")), 0);
    const json j = read("rectangle.classify.json");
    EXPECT_EQ(j.at("schema"), "pocketforge/1");
    EXPECT_EQ(j.at("closure"), "closed");
}

TEST_F(Cli, SimulateLineTime)
{
    ASSERT_EQ(run("simulate --toolpath " + data("toolpaths/line100.json") + " --machine " + data("machines/a1000.json")), 0);
    const json j = read("line100.simulate.json");
    EXPECT_NEAR(j.at("time").get<double>(), 2.05, 1e-4);
    EXPECT_TRUE(fs::exists(out_ / "line100.simulate.profile.csv"));
    EXPECT_TRUE(fs::exists(out_ / "line100.simulate.histogram.csv"));
}

TEST_F(Cli, AdviseDumbbellTwoTools)
{
    ASSERT_EQ(run("advise --pocket " + data("pockets/dumbbell.json") + " --tools " + data("tools/dumbbell_ratio130.json") +
                  " --machine " + data("machines/default.json")),
              0);
    const json j = read("dumbbell.advise.json");
    const json& reports = j.at("advice").at("reports");
    ASSERT_EQ(reports.size(), 2u);
    for (const json& r : reports) EXPECT_EQ(r.at("ranked").size() + r.at("failures").size(), 8u);
    EXPECT_TRUE(fs::exists(out_ / "dumbbell.advise.md"));
}

TEST_F(Cli, PathgenWritesGcode)
{
    ASSERT_EQ(run("pathgen --gcode --pocket " + data("pockets/rectangle.json") + " --tools " + data("tools/standard.json") +
                  " --strategy " + data("strategies/spiral_classic.json")),
              0);
    const json j = read("rectangle.pathgen.json");
    EXPECT_FALSE(j.at("toolpaths").empty());
    EXPECT_TRUE(fs::exists(out_ / "rectangle.pathgen.nc"));
    EXPECT_TRUE(fs::exists(out_ / "rectangle.pathgen.svg"));
}

TEST_F(Cli, ExitCodes)
{
    EXPECT_EQ(run("classify --pocket /nonexistent.json"), 3);
    EXPECT_EQ(error().at("error").at("code"), "not_found");
    EXPECT_EQ(run("simulate --toolpath " + data("toolpaths/line100.json") + " --machine " + data("machines/a1000.json") +
                  " --feed 10"),
              1);
    EXPECT_EQ(error().at("error").at("code"), "bad_feed");
    EXPECT_EQ(run("classify"), 1);
    EXPECT_EQ(run("frobnicate"), 1);
}
