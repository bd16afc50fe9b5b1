#include "matterhorn/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace matterhorn {

int MacroParams::read_group() const {
  if (rows_per_read > 0) return std::min(rows_per_read, rows);
  // Largest n with n * g_off * v_read < lsb / 2.
  const double per_cell = g_off * v_read;
  if (per_cell <= 0.0) return rows;
  int n = static_cast<int>(std::floor((lsb() / 2.0) / per_cell));
  while (n > 0 && !adc_linear_margin(*this, n)) --n;
  return std::clamp(n, 1, rows);
}

void MacroParams::validate() const {
  if (rows <= 0 || cols <= 0) throw ParameterError("macro dimensions must be positive");
  if (!(g_on > g_off) || g_off < 0.0) throw ParameterError("conductances must satisfy 0 <= g_off < g_on");
  if (!(v_read > 0.0)) throw ParameterError("read voltage must be positive");
  if (adc_lsb < 0.0) throw ParameterError("ADC LSB must be nonnegative");
  if (rows_per_read < 0) throw ParameterError("rows_per_read must be nonnegative");
}

bool adc_linear_margin(const MacroParams& p, int active_rows) {
  // Relative guard so an exact tie in real arithmetic counts as no margin.
  const double leak = p.g_off * static_cast<double>(active_rows) * p.v_read;
  return leak < (p.lsb() / 2.0) * (1.0 - 1e-12);
}

SignMatrix SignMatrix::from_values(int rows, int cols, std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(rows) * cols) throw ShapeError("value count does not match shape");
  SignMatrix m(rows, cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 1.0) {
      m.v[i] = 1;
    } else if (values[i] == -1.0) {
      m.v[i] = -1;
    } else {
      throw ValueError("MSU weights must be exactly -1 or +1");
    }
  }
  return m;
}

ConductanceGrid map_signed_weights(const SignMatrix& w, const MacroParams& p) {
  ConductanceGrid grid{w.rows, w.cols, std::vector<double>(w.v.size())};
  for (std::size_t i = 0; i < w.v.size(); ++i) {
    if (w.v[i] == 1) {
      grid.g[i] = p.g_on;
    } else if (w.v[i] == -1) {
      grid.g[i] = p.g_off;
    } else {
      throw ValueError("MSU weights must be exactly -1 or +1");
    }
  }
  return grid;
}

SignMatrix recover_signed_weights(const ConductanceGrid& grid, const MacroParams& p) {
  SignMatrix w(grid.rows, grid.cols);
  for (std::size_t i = 0; i < grid.g.size(); ++i) {
    if (grid.g[i] == p.g_on) {
      w.v[i] = 1;
    } else if (grid.g[i] == p.g_off) {
      w.v[i] = -1;
    } else {
      throw ValueError("cell conductance is neither g_on nor g_off");
    }
  }
  return w;
}

CrossbarMacro::CrossbarMacro(MacroParams params, ConductanceGrid grid) : params_(params), grid_(std::move(grid)) {
  params_.validate();
  if (grid_.rows > params_.rows || grid_.cols > params_.cols) throw ShapeError("grid larger than the macro");
  if (grid_.g.size() != static_cast<std::size_t>(grid_.rows) * grid_.cols) throw ShapeError("grid storage size");
  for (const double g : grid_.g) {
    if (g != params_.g_on && g != params_.g_off) throw ValueError("cells must hold g_on or g_off");
  }
}

ColumnReadout CrossbarMacro::read(std::span<const std::uint8_t> active_rows) const {
  if (active_rows.size() != static_cast<std::size_t>(grid_.rows)) {
    throw ShapeError("word-line vector has " + std::to_string(active_rows.size()) + " entries, macro has " +
                     std::to_string(grid_.rows) + " rows");
  }
  ColumnReadout out{std::vector<double>(grid_.cols, 0.0), std::vector<int>(grid_.cols, 0)};
  for (int r = 0; r < grid_.rows; ++r) {
    if (active_rows[r] == 0) continue;
    const double* row = grid_.g.data() + static_cast<std::size_t>(r) * grid_.cols;
    for (int c = 0; c < grid_.cols; ++c) out.currents[c] += params_.v_read * row[c];
  }
  const double lsb = params_.lsb();
  for (int c = 0; c < grid_.cols; ++c) {
    const long long code = std::llround(out.currents[c] / lsb);
    out.codes[c] = static_cast<int>(std::min<long long>(code, grid_.rows));
  }
  return out;
}

ColumnReadout analog_column_readout(std::span<const std::uint8_t> active_rows, const CrossbarMacro& macro) {
  return macro.read(active_rows);
}

std::vector<long long> bit_serial_vmm(std::span<const int> inputs, const CrossbarMacro& macro, int input_bits) {
  const int rows = macro.rows();
  if (inputs.size() != static_cast<std::size_t>(rows)) throw ShapeError("input length must equal the macro rows");
  if (input_bits < 1 || input_bits > 30) throw ParameterError("input_bits must be in [1, 30]");
  const long long limit = 1LL << input_bits;
  for (const int a : inputs) {
    if (a < 0 || a >= limit) {
      throw RangeError("input " + std::to_string(a) + " does not fit in " + std::to_string(input_bits) + " bits");
    }
  }

  const int group = macro.params().read_group();
  std::vector<long long> result(macro.cols(), 0);
  std::vector<std::uint8_t> plane(rows, 0);
  for (int bit = 0; bit < input_bits; ++bit) {
    std::vector<long long> partial(macro.cols(), 0);
    for (int begin = 0; begin < rows; begin += group) {
      const int end = std::min(rows, begin + group);
      bool any = false;
      std::fill(plane.begin(), plane.end(), 0);
      for (int r = begin; r < end; ++r) {
        plane[r] = static_cast<std::uint8_t>((inputs[r] >> bit) & 1);
        any = any || plane[r] != 0;
      }
      if (!any) continue;  // no word line raised, no read
      const ColumnReadout readout = macro.read(plane);
      for (int c = 0; c < macro.cols(); ++c) partial[c] += readout.codes[c];
    }
    for (int c = 0; c < macro.cols(); ++c) result[c] += partial[c] << bit;
  }
  return result;
}

std::vector<long long> signed_correct_integer(std::span<const long long> r_cim, long long input_sum) {
  std::vector<long long> out(r_cim.size());
  for (std::size_t c = 0; c < r_cim.size(); ++c) out[c] = 2 * r_cim[c] - input_sum;
  return out;
}

std::vector<double> signed_correct(std::span<const long long> r_cim, long long input_sum, const MsuConfig& cfg) {
  const std::vector<long long> exact = signed_correct_integer(r_cim, input_sum);
  std::vector<double> out(exact.size());
  for (std::size_t c = 0; c < exact.size(); ++c) out[c] = cfg.gamma * static_cast<double>(exact[c]);
  return out;
}

int tile_count(int inputs, int outputs, const MacroParams& p) {
  const int rt = (inputs + p.rows - 1) / p.rows;
  const int ct = (outputs + p.cols - 1) / p.cols;
  return rt * ct;
}

TiledVmmResult tiled_vmm(std::span<const int> inputs, const SignMatrix& w, const MsuConfig& cfg,
                         std::span<const int> tile_order) {
  const MacroParams& p = cfg.macro;
  p.validate();
  if (inputs.size() != static_cast<std::size_t>(w.rows)) throw ShapeError("input length must equal the weight rows");

  TiledVmmResult out;
  out.row_tiles = (w.rows + p.rows - 1) / p.rows;
  out.col_tiles = (w.cols + p.cols - 1) / p.cols;
  out.tiles = out.row_tiles * out.col_tiles;

  std::vector<int> order(tile_order.begin(), tile_order.end());
  if (order.empty()) {
    order.resize(out.tiles);
    std::iota(order.begin(), order.end(), 0);
  }
  {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < out.tiles; ++i) {
      if (static_cast<int>(sorted.size()) != out.tiles || sorted[i] != i) {
        throw UsageError("tile_order must be a permutation of the tile indices");
      }
    }
  }

  out.integer.assign(w.cols, 0);
  for (const int tile : order) {
    const int tr = tile / out.col_tiles;
    const int tc = tile % out.col_tiles;
    const int r0 = tr * p.rows;
    const int c0 = tc * p.cols;
    const int nr = std::min(p.rows, w.rows - r0);
    const int nc = std::min(p.cols, w.cols - c0);

    SignMatrix sub(nr, nc);
    for (int r = 0; r < nr; ++r) {
      for (int c = 0; c < nc; ++c) sub(r, c) = w(r0 + r, c0 + c);
    }
    const CrossbarMacro macro(p, map_signed_weights(sub, p));
    const std::span<const int> slice = inputs.subspan(r0, nr);
    const long long slice_sum = std::accumulate(slice.begin(), slice.end(), 0LL);
    const std::vector<long long> partial = signed_correct_integer(bit_serial_vmm(slice, macro, cfg.input_bits), slice_sum);
    for (int c = 0; c < nc; ++c) out.integer[c0 + c] += partial[c];
  }

  out.values.resize(out.integer.size());
  for (std::size_t c = 0; c < out.integer.size(); ++c) out.values[c] = cfg.gamma * static_cast<double>(out.integer[c]);
  return out;
}

std::vector<long long> signed_vmm_reference(std::span<const int> inputs, const SignMatrix& w) {
  if (inputs.size() != static_cast<std::size_t>(w.rows)) throw ShapeError("input length must equal the weight rows");
  std::vector<long long> out(w.cols, 0);
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) out[c] += static_cast<long long>(inputs[r]) * w(r, c);
  }
  return out;
}

ReadoutExample small_readout_example() {
  ReadoutExample ex;
  ex.params.rows = 3;
  ex.params.cols = 4;
  const double cells[] = {1, -1, -1, 1, -1, -1, 1, 1, 1, 1, -1, 1};
  ex.weights = SignMatrix::from_values(3, 4, cells);
  ex.active = {1, 1, 0};
  return ex;
}

}  // namespace matterhorn
