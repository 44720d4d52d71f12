// episim command line: headless runs and the live server.
//
// Exit codes:
//   0  success
//   1  unexpected internal error
//   2  bad command line usage
//   3  input file not found or unreadable
//   4  input could not be parsed (JSON syntax, unknown field, unknown switch)
//   5  input parsed but is invalid (config validation, schedule conflicts)
//   6  output could not be written
//   7  server could not bind its address

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "episim/episim.hpp"
#include "episim/net/server.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kNotFound = 3,
  kParse = 4,
  kInvalid = 5,
  kWrite = 6,
  kBind = 7,
};

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(episim::ErrorCode code) {
  using episim::ErrorCode;
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownField:
    case ErrorCode::UnknownSwitch:
    case ErrorCode::UnknownRoute:
    case ErrorCode::MalformedMessage: return kParse;
    case ErrorCode::Io: return kNotFound;
    default: return kInvalid;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kNotFound, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Inputs {
  std::string config_path;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> ticks;
  std::string out_path;
  std::string format = "csv";
};

episim::Scenario load(const Inputs& in) {
  if (!in.scenario_path.empty() && !in.config_path.empty()) {
    throw Failure{kUsage, "--config and --scenario are exclusive; a scenario carries its own config"};
  }
  episim::Scenario s;
  if (!in.scenario_path.empty()) s = episim::parse_scenario(read_file(in.scenario_path));
  if (!in.config_path.empty()) s.config = episim::parse_config(read_file(in.config_path));
  if (in.seed) s.seed = *in.seed;
  if (in.ticks) s.total_ticks = *in.ticks;
  return s;
}

void write_metrics(const Inputs& in, const episim::MetricsSeries& series) {
  const auto text = in.format == "json" ? episim::export_json(series) + "\n" : episim::export_csv(series);
  if (in.out_path.empty() || in.out_path == "-") {
    std::cout << text << std::flush;
    if (!std::cout) throw Failure{kWrite, "cannot write to stdout"};
    return;
  }
  std::ofstream out(in.out_path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Failure{kWrite, "cannot write '" + in.out_path + "'"};
}

int run_headless(const Inputs& in) {
  if (in.scenario_path.empty() && !in.ticks) throw Failure{kUsage, "run needs --ticks or --scenario"};
  const auto scenario = load(in);
  write_metrics(in, episim::run_scenario(scenario).series);
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = -1;
  std::string ui_dir;
  std::uint64_t snapshot_interval = 1;
  double tick_rate = 20.0;
  bool paused = false;
};

int serve(const Inputs& in, const ServeArgs& args) {
  namespace asio = boost::asio;
  if (args.port < 0 || args.port > 65535) throw Failure{kUsage, "serve needs --port (0 picks a free port)"};
  if (!(args.tick_rate > 0.0)) throw Failure{kUsage, "--tick-rate must be > 0"};

  const auto scenario = load(in);
  episim::require_valid(scenario.config);

  episim::LiveOptions opts;
  opts.tick_rate = args.tick_rate;
  opts.snapshot_interval = args.snapshot_interval;
  opts.start_paused = args.paused;
  episim::LiveSimulation live(scenario, opts);

  asio::io_context io;
  asio::signal_set signals(io, SIGINT, SIGTERM);
  std::optional<episim::net::Server> server;
  try {
    episim::net::ServerOptions so;
    so.address = args.host;
    so.port = static_cast<std::uint16_t>(args.port);
    so.ui_dir = args.ui_dir;
    server.emplace(io, live, so);
  } catch (const std::exception& e) {
    throw Failure{kBind, "cannot listen on " + args.host + ":" + std::to_string(args.port) + ": " + e.what()};
  }
  live.set_sink(server->sink());
  server->start();

  std::cout << "listening on http://" << server->address() << ":" << server->port() << "/" << std::endl;

  std::jthread loop([&live](std::stop_token stop) { live.run(stop); });

  signals.async_wait([&](const boost::system::error_code&, int) {
    loop.request_stop();
    server->stop();
    io.stop();
  });
  io.run();
  loop.join();

  if (!in.out_path.empty()) write_metrics(in, live.series());
  std::cerr << "stopped at tick " << live.state().tick << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multi-site epidemic simulator"};
  app.require_subcommand(1);

  Inputs in;
  ServeArgs serve_args;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", in.config_path, "World configuration JSON");
    cmd->add_option("--scenario", in.scenario_path, "Scenario JSON (config, seed, ticks, switch events)");
    cmd->add_option("--seed", in.seed, "Random seed (overrides the scenario)");
    cmd->add_option("--out", in.out_path, "Metrics output file (default: stdout for run)");
    cmd->add_option("--format", in.format, "Metrics format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* run = app.add_subcommand("run", "Run a scenario headlessly and write its metrics");
  add_common(run);
  run->add_option("--ticks", in.ticks, "Number of ticks (overrides the scenario)");

  auto* srv = app.add_subcommand("serve", "Run live and serve the WebSocket protocol and UI");
  add_common(srv);
  srv->add_option("--port", serve_args.port, "TCP port; 0 picks a free one")->required();
  srv->add_option("--host", serve_args.host, "Address to bind");
  srv->add_option("--snapshot-interval", serve_args.snapshot_interval, "Ticks between snapshots")
      ->check(CLI::PositiveNumber);
  srv->add_option("--tick-rate", serve_args.tick_rate, "Ticks per second")->check(CLI::PositiveNumber);
  srv->add_option("--ui-dir", serve_args.ui_dir, "Directory with the static UI bundle");
  srv->add_flag("--paused", serve_args.paused, "Start paused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return run_headless(in);
    return serve(in, serve_args);
  } catch (const Failure& f) {
    std::cerr << "episim: " << f.message << "\n";
    return f.code;
  } catch (const episim::Error& e) {
    std::cerr << "episim: " << episim::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "episim: internal error: " << e.what() << "\n";
    return kInternal;
  }
}
