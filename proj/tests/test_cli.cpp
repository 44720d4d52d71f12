#include <gtest/gtest.h>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "episim/episim.hpp"

extern char** environ;

namespace {

namespace fs = std::filesystem;

struct Child {
  pid_t pid = -1;
  int out = -1;  // stdout pipe
};

Child spawn(const std::vector<std::string>& args) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe");
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, fds[0]);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  std::vector<char*> argv;
  std::string bin = EPISIM_CLI_PATH;
  argv.push_back(bin.data());
  std::vector<std::string> copy = args;
  for (auto& a : copy) argv.push_back(a.data());
  argv.push_back(nullptr);
  Child c;
  if (posix_spawn(&c.pid, bin.c_str(), &actions, nullptr, argv.data(), environ) != 0) {
    throw std::runtime_error("spawn");
  }
  posix_spawn_file_actions_destroy(&actions);
  close(fds[1]);
  c.out = fds[0];
  return c;
}

int wait_exit(pid_t pid) {
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

struct Result {
  int code;
  std::string out;
};

Result run(const std::vector<std::string>& args) {
  auto c = spawn(args);
  std::string out;
  char buf[4096];
  for (ssize_t n; (n = read(c.out, buf, sizeof buf)) > 0;) out.append(buf, static_cast<std::size_t>(n));
  close(c.out);
  return {wait_exit(c.pid), out};
}

std::string read_line(int fd, std::chrono::milliseconds timeout) {
  std::string line;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    pollfd p{fd, POLLIN, 0};
    if (poll(&p, 1, 50) <= 0) continue;
    char ch;
    if (read(fd, &ch, 1) != 1) break;
    if (ch == '\n') return line;
    line += ch;
  }
  return line;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("episim_cli_" + std::to_string(getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  static std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RunWritesCsvToStdout) {
  const auto r = run({"run", "--ticks", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind(std::string(episim::kMetricsCsvHeader) + "\n", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
}

TEST_F(CliTest, RunMatchesLibrary) {
  const auto scenario = write("s.json", R"({"seed": 5, "total_ticks": 120, "events": [
      {"at_tick": 0, "switch": "infect-red", "value": true},
      {"at_tick": 0, "switch": "propagate-infection", "value": true},
      {"at_tick": 10, "switch": "route-red-blue-enable", "value": true}]})");
  const auto out = (dir_ / "m.json").string();
  EXPECT_EQ(run({"run", "--scenario", scenario, "--out", out, "--format", "json"}).code, 0);
  const auto expected = episim::run_scenario(episim::parse_scenario(slurp(scenario))).series;
  EXPECT_EQ(episim::parse_metrics_json(slurp(out)), expected);
}

TEST_F(CliTest, SeedAndTicksOverrideScenario) {
  const auto scenario = write("s.json", R"({"seed": 5, "total_ticks": 50,
      "events": [{"at_tick": 0, "switch": "infect-red", "value": true}]})");
  const auto a = run({"run", "--scenario", scenario, "--seed", "6", "--ticks", "7"});
  auto s = episim::parse_scenario(slurp(scenario));
  s.seed = 6;
  s.total_ticks = 7;
  EXPECT_EQ(a.out, episim::export_csv(episim::run_scenario(s).series));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"run"}).code, 2);
  EXPECT_EQ(run({"run", "--ticks", "x"}).code, 2);
  EXPECT_EQ(run({"run", "--ticks", "3", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"run", "--scenario", (dir_ / "missing.json").string()}).code, 3);
  EXPECT_EQ(run({"run", "--ticks", "3", "--config", write("bad.json", "{\"local_step\": 1.0,,}")}).code, 4);
  EXPECT_EQ(run({"run", "--ticks", "3", "--config", write("unk.json", "{\"agent_per_site\": 1}")}).code, 4);
  EXPECT_EQ(run({"run", "--ticks", "3", "--config", write("p.json", "{\"base_infection_prob\": 1.5}")}).code, 5);
  EXPECT_EQ(run({"run", "--scenario", write("latch.json", R"({"events": [
      {"at_tick": 1, "switch": "infect-red", "value": true},
      {"at_tick": 2, "switch": "infect-red", "value": false}]})")}).code,
            5);
  EXPECT_EQ(run({"run", "--ticks", "3", "--out", (dir_ / "no" / "such" / "dir.csv").string()}).code, 6);
  EXPECT_EQ(run({"serve"}).code, 2);
}

TEST_F(CliTest, ServeDefaultConfigOffersHello) {
  auto c = spawn({"serve", "--port", "0", "--tick-rate", "200"});
  const auto line = read_line(c.out, std::chrono::seconds(10));
  std::smatch m;
  ASSERT_TRUE(std::regex_search(line, m, std::regex(R"(:(\d+)/$)"))) << line;
  // bound address is reachable and a second server on it fails to bind
  EXPECT_EQ(run({"serve", "--port", m[1].str()}).code, 7);
  kill(c.pid, SIGINT);
  close(c.out);
  EXPECT_EQ(wait_exit(c.pid), 0);
}

TEST_F(CliTest, SigintFlushesMetrics) {
  const auto out = (dir_ / "live.csv").string();
  auto c = spawn({"serve", "--port", "0", "--tick-rate", "500", "--out", out});
  ASSERT_FALSE(read_line(c.out, std::chrono::seconds(10)).empty());
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  kill(c.pid, SIGINT);
  close(c.out);
  EXPECT_EQ(wait_exit(c.pid), 0);
  const auto csv = slurp(out);
  ASSERT_EQ(csv.rfind(std::string(episim::kMetricsCsvHeader) + "\n", 0), 0u);
  const auto rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  EXPECT_GT(rows, 0);
  // rows are the contiguous ticks 0..n-1
  std::istringstream in(csv);
  std::string row;
  std::getline(in, row);
  for (long t = 0; std::getline(in, row); ++t) EXPECT_EQ(row.substr(0, row.find(',')), std::to_string(t));
}
