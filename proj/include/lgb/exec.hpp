#pragma once

namespace lgb {

/// Execution policy for the data-parallel stages. Serial is the reference
/// implementation; Parallel fans out over OpenMP and must produce
/// byte-identical results.
enum class Exec { Serial, Parallel };

}  // namespace lgb
