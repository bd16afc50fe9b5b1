#include "matterhorn/area.hpp"

#include "matterhorn/errors.hpp"

namespace matterhorn {

void AreaParams::validate() const {
  if (macro_rows < 1 || macro_cols < 1) throw ParameterError("macro dimensions must be positive");
  if (!(cell_um2 > 0.0)) throw ParameterError("cell area must be positive");
  if (macro_mm2 < 0.0) throw ParameterError("macro area must be nonnegative");
  if (!(routing_factor >= 1.0)) throw ParameterError("routing factor must be at least 1");
}

double AreaParams::macro_area_mm2() const {
  if (macro_mm2 > 0.0) return macro_mm2;
  return cell_um2 * macro_rows * macro_cols * 1e-6;
}

AreaEstimate area_estimate(const BlockDescriptor& desc, const AreaParams& p) {
  desc.validate();
  p.validate();
  AreaEstimate est;
  for (const auto& layer : desc.fc) {
    const long long rt = (layer.c_in + p.macro_rows - 1) / p.macro_rows;
    const long long ct = (layer.c_out + p.macro_cols - 1) / p.macro_cols;
    est.macros_per_block += rt * ct;
  }
  const double macros = static_cast<double>(est.macros_per_block);
  est.array_mm2 = macros * p.cell_um2 * p.macro_rows * p.macro_cols * 1e-6;
  est.block_mm2 = macros * p.macro_area_mm2() * p.routing_factor;
  est.model_mm2 = est.block_mm2 * desc.layers;
  return est;
}

}  // namespace matterhorn
