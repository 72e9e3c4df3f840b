#pragma once

// Lower-density floors for A_1..A_4 (geometric:4, r_max = 6, H = 1e5),
// frozen at the first verified run. Checkpoints 4^3 .. 4^8.
inline constexpr double kFrozenDensity[4] = {0.0156, 0.0078, 0.0052, 0.0026};
