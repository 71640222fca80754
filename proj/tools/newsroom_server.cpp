// newsroom-server: create a data directory, or serve one.
//
//   newsroom-server init --data-dir DIR
//   newsroom-server run  (--config FILE | --data-dir DIR) [--host H] [--port N]

#include <pthread.h>
#include <signal.h>

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "newsroom/server/server.hpp"

namespace fs = std::filesystem;
using namespace newsroom;

namespace {

int run(const fs::path& config_file, const fs::path& data_dir, const std::string& host, int port) {
  server::ServerConfig cfg;
  if (!config_file.empty()) {
    cfg = server::load_config(config_file);
  } else if (fs::exists(data_dir / server::kConfigFileName)) {
    cfg = server::load_config(data_dir / server::kConfigFileName);
  } else {
    cfg.data_dir = data_dir;
  }
  if (!host.empty()) cfg.host = host;
  if (port >= 0) cfg.port = port;

  // Handle SIGINT/SIGTERM on a dedicated thread; block them everywhere else.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  server::NewsServer srv(cfg);
  const int bound = srv.bind();
  std::cout << "listening on " << cfg.host << ':' << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    srv.stop();
  });
  srv.run();
  // run() can also return on its own (listener failure); wake the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "stopped" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newsroom content server"};
  app.require_subcommand(1);

  fs::path init_dir;
  auto* init = app.add_subcommand("init", "create a data directory with a default config");
  init->add_option("-d,--data-dir,dir", init_dir, "directory to create (absent or empty)")
      ->required();

  fs::path config_file;
  fs::path data_dir;
  std::string host;
  int port = -1;
  auto* serve = app.add_subcommand("run", "serve a data directory");
  auto* cfg_opt = serve->add_option("-c,--config", config_file, "config file");
  serve->add_option("-d,--data-dir", data_dir, "data directory (uses its server.conf if present)")
      ->excludes(cfg_opt);
  serve->add_option("--host", host, "override bind host");
  serve->add_option("-p,--port", port, "override bind port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*init) {
      const auto file = server::init_data_dir(init_dir);
      std::cout << "initialized " << init_dir.string() << "\nconfig: " << file.string() << '\n';
      return 0;
    }
    if (config_file.empty() && data_dir.empty()) {
      std::cerr << "run: --config or --data-dir is required\n";
      return 2;
    }
    return run(config_file, data_dir, host, port);
  } catch (const server::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
