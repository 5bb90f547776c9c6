#pragma once

#include <functional>

#include "CLI11.hpp"

namespace poolnet::cli {

using Action = std::function<int()>;

// Each function registers a subcommand and returns the action to run when it
// is selected.
Action add_generate(CLI::App& app);
Action add_train(CLI::App& app);
Action add_audit(CLI::App& app);
Action add_vc(CLI::App& app);
Action add_psi(CLI::App& app);
Action add_sweep(CLI::App& app);
Action add_plot(CLI::App& app);

}  // namespace poolnet::cli
