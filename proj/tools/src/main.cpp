#include <iostream>
#include <vector>

#include "commands.hpp"
#include "options.hpp"
#include "poolnet/errors.hpp"

using namespace poolnet::cli;

int main(int argc, char** argv) {
  CLI::App app{"Max-pooling pattern-detection networks: training, audits and sweeps", "poolnet"};
  app.require_subcommand(1);
  std::vector<std::pair<CLI::App*, Action>> commands;
  auto reg = [&](Action (*add)(CLI::App&)) {
    const std::size_t before = app.get_subcommands({}).size();
    Action act = add(app);
    commands.emplace_back(app.get_subcommands({})[before], std::move(act));
  };
  reg(add_generate);
  reg(add_train);
  reg(add_audit);
  reg(add_vc);
  reg(add_psi);
  reg(add_sweep);
  reg(add_plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    for (auto& [sub, act] : commands) {
      if (sub->parsed()) return act();
    }
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const poolnet::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const poolnet::DimensionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const poolnet::FormatError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
