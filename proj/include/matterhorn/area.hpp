#pragma once

#include "matterhorn/energy.hpp"

namespace matterhorn {

struct AreaParams {
  double cell_um2 = 0.59;
  int macro_rows = 256;
  int macro_cols = 256;
  /// Macro footprint including periphery; 0 derives it from the cell area.
  double macro_mm2 = 0.072;
  /// Multiplier for inter-macro routing and digital glue.
  double routing_factor = 1.2;

  void validate() const;
  [[nodiscard]] double macro_area_mm2() const;
};

struct AreaEstimate {
  long long macros_per_block = 0;
  double array_mm2 = 0;  // bare cell area of all macros in a block
  double block_mm2 = 0;  // macros * macro area * routing factor
  double model_mm2 = 0;  // block_mm2 * layers
};

/// Counts one macro per rows x cols tile of every binary-weight projection.
AreaEstimate area_estimate(const BlockDescriptor& desc, const AreaParams& p = {});

}  // namespace matterhorn
