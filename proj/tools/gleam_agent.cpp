#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gleam/bridge.hpp"
#include "gleam/episode_log.hpp"

// Reference agent for the policy bridge: answers every step on stdin with an
// action on stdout.
int main(int argc, char** argv) {
  CLI::App app{"gleam-agent: scripted policy bridge agent"};
  std::string mode = "echo";
  std::string log_path;
  gleam::Action fixed;
  app.add_option("--mode", mode, "echo (stay put), replay (actions of a log) or fixed")
      ->check(CLI::IsMember({"echo", "replay", "fixed"}))
      ->capture_default_str();
  app.add_option("--log", log_path, "Episode log for replay mode");
  app.add_option("--dx", fixed.dx, "Fixed mode forward offset (m)");
  app.add_option("--dy", fixed.dy, "Fixed mode leftward offset (m)");
  app.add_option("--dtheta", fixed.dtheta, "Fixed mode heading change (rad)");
  CLI11_PARSE(app, argc, argv);

  std::vector<gleam::Action> script;
  if (mode == "replay") {
    if (log_path.empty()) {
      std::cerr << "gleam-agent: replay mode needs --log\n";
      return 1;
    }
    try {
      script = gleam::logged_actions(gleam::load_episode_log(log_path));
    } catch (const std::exception& e) {
      std::cerr << "gleam-agent: " << e.what() << "\n";
      return 1;
    }
  }

  std::string line;
  if (!std::getline(std::cin, line)) {
    return 1;
  }
  std::cout << gleam::handshake_message() << "\n" << std::flush;
  std::size_t next = 0;
  while (std::getline(std::cin, line)) {
    try {
      gleam::decode_step(line);
    } catch (const gleam::BridgeError& e) {
      std::cerr << "gleam-agent: " << e.what() << "\n";
      return 1;
    }
    gleam::Action a;
    if (mode == "fixed") {
      a = fixed;
    } else if (mode == "replay" && next < script.size()) {
      a = script[next++];
    }
    std::cout << gleam::encode_action(a) << "\n" << std::flush;
  }
  return 0;
}
