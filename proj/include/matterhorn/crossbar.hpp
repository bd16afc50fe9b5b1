#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matterhorn/types.hpp"

namespace matterhorn {

/// Physical constants and geometry of one binary-cell nT1R macro.
struct MacroParams {
  int rows = 256;
  int cols = 256;
  double g_on = 100e-6;   // S
  double g_off = 1e-6;    // S
  double v_read = 0.1;    // V
  double adc_lsb = 0.0;   // A per code; 0 selects g_on * v_read
  /// Word lines raised per analog read; 0 selects the largest count whose
  /// worst-case off-cell leakage stays below half an LSB.
  int rows_per_read = 0;

  [[nodiscard]] double lsb() const { return adc_lsb > 0.0 ? adc_lsb : g_on * v_read; }
  [[nodiscard]] int read_group() const;
  void validate() const;
};

/// True when n active off-cells leak less than half an ADC LSB, i.e. the ADC
/// code of a column equals its count of active on-cells.
bool adc_linear_margin(const MacroParams& p, int active_rows);

/// {-1,+1} matrix stored row-major as int8.
struct SignMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int8_t> v;

  SignMatrix() = default;
  SignMatrix(int r, int c, std::int8_t fill = 1) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

  [[nodiscard]] std::int8_t operator()(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
  std::int8_t& operator()(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }

  static SignMatrix from_values(int rows, int cols, std::span<const double> values);
  friend bool operator==(const SignMatrix&, const SignMatrix&) = default;
};

/// Conductance per cell in Siemens, row-major.
struct ConductanceGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> g;

  [[nodiscard]] double operator()(int r, int c) const { return g[static_cast<std::size_t>(r) * cols + c]; }
};

/// W_CIM = (W + 1) / 2: -1 -> g_off, +1 -> g_on.
ConductanceGrid map_signed_weights(const SignMatrix& w, const MacroParams& p);

/// Inverse of map_signed_weights (2 * W_CIM - 1). Throws ValueError on a
/// conductance that is neither g_on nor g_off.
SignMatrix recover_signed_weights(const ConductanceGrid& grid, const MacroParams& p);

struct ColumnReadout {
  std::vector<double> currents;  // A
  std::vector<int> codes;
};

/// A programmed crossbar. Cells hold exactly g_on or g_off.
class CrossbarMacro {
 public:
  CrossbarMacro(MacroParams params, ConductanceGrid grid);

  [[nodiscard]] const MacroParams& params() const { return params_; }
  [[nodiscard]] const ConductanceGrid& grid() const { return grid_; }
  [[nodiscard]] int rows() const { return grid_.rows; }
  [[nodiscard]] int cols() const { return grid_.cols; }

  /// One analog read: I_col = sum over active rows of v_read * G(row, col),
  /// codes = round(I / lsb) saturating at the row count.
  [[nodiscard]] ColumnReadout read(std::span<const std::uint8_t> active_rows) const;

 private:
  MacroParams params_;
  ConductanceGrid grid_;
};

ColumnReadout analog_column_readout(std::span<const std::uint8_t> active_rows, const CrossbarMacro& macro);

/// Bit-serial VMM: LSB-first bit planes, each plane read in word-line groups
/// of params().read_group() and shift-added digitally. Returns R_CIM =
/// inputs x W_CIM. Throws RangeError on an input outside [0, 2^input_bits).
std::vector<long long> bit_serial_vmm(std::span<const int> inputs, const CrossbarMacro& macro, int input_bits);

struct MsuConfig {
  double gamma = 1.0;
  int input_bits = 4;
  MacroParams macro;
};

/// 2 * R_CIM - sum(a), the signed product before the gamma scale.
std::vector<long long> signed_correct_integer(std::span<const long long> r_cim, long long input_sum);

/// R = gamma * (2 * R_CIM - sum(a)).
std::vector<double> signed_correct(std::span<const long long> r_cim, long long input_sum, const MsuConfig& cfg);

struct TiledVmmResult {
  std::vector<long long> integer;  // signed product before gamma
  std::vector<double> values;      // gamma applied
  int tiles = 0;
  int row_tiles = 0;
  int col_tiles = 0;
};

int tile_count(int inputs, int outputs, const MacroParams& p);

/// Partitions W (C_i x C_o) into rows x cols macro tiles, runs each through
/// the bit-serial path with its own input-slice sum, and accumulates the
/// corrected partials digitally. tile_order, when non-empty, is a
/// permutation of tile indices (row-major over the tile grid) giving the
/// traversal order.
TiledVmmResult tiled_vmm(std::span<const int> inputs, const SignMatrix& w, const MsuConfig& cfg,
                         std::span<const int> tile_order = {});

/// Direct signed product inputs x W in integers; the reference for the
/// bit-serial path.
std::vector<long long> signed_vmm_reference(std::span<const int> inputs, const SignMatrix& w);

/// 3 x 4 worked example with word lines (1, 1, 0) raised over a mix of on
/// and off cells. Expected currents 10.1, 0.2, 10.1, 20.0 uA, codes 1, 0, 1, 2.
struct ReadoutExample {
  MacroParams params;
  SignMatrix weights;
  std::vector<std::uint8_t> active;
};
ReadoutExample small_readout_example();

}  // namespace matterhorn
