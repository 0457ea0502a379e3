#pragma once

// Placeholder until the CLI lands; keeps the tools target building.
namespace gtdyn {
inline int cli_main(int, char**) { return 0; }
}  // namespace gtdyn
