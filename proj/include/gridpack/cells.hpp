#ifndef GRIDPACK_CELLS_HPP
#define GRIDPACK_CELLS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridpack/grid.hpp"
#include "gridpack/matrix.hpp"
#include "gridpack/rng.hpp"
#include "gridpack/skew.hpp"

namespace gridpack {

enum class CellKind : std::uint8_t { Plain = 0, LeakyLp = 1 };

std::string cell_kind_name(CellKind kind);
CellKind cell_kind_from_name(const std::string& name);

// Weights for one scan direction of a 2-D recurrent cell. Gates in fixed
// order: g (cell input), i, f1, f2, o. u1_* feed from the left predecessor,
// u2_* from the top predecessor. v1/v2 feed the mixed previous memory into
// the two output gates of the leaky cell; the plain cell ignores them.
struct CellParams {
  int hidden_size = 0;
  int input_channels = 0;
  Mat w_g, w_i, w_f1, w_f2, w_o;       // input_channels x hidden_size
  Mat u1_g, u1_i, u1_f1, u1_f2, u1_o;  // hidden_size x hidden_size
  Mat u2_g, u2_i, u2_f1, u2_f2, u2_o;  // hidden_size x hidden_size
  Mat v1, v2;                          // hidden_size x hidden_size
  std::vector<float> b_g, b_i, b_f1, b_f2, b_o;
};

CellParams zero_cell_params(int hidden_size, int input_channels);
// Uniform in [-0.1, 0.1].
CellParams random_cell_params(int hidden_size, int input_channels, Rng& rng);
// Throws ShapeError on dimension mismatch, ArgumentError on non-finite values.
void validate(const CellParams& p);

struct ScanResult {
  ImageGrid hidden;  // height x original_width x hidden_size, unskewed
  ImageGrid memory;
};

// Column-by-column scan over a skewed grid. Per valid cell with input x and
// predecessor pairs (h1,s1) from the previous skewed column same row, (h2,s2)
// from the previous skewed column one row up (zero when masked or outside):
//   a  = tanh(Wg x + U1g h1 + U2g h2 + bg)
//   i  = sig(Wi x + U1i h1 + U2i h2 + bi)
//   f1 = sig(Wf1 x + ...), f2 = sig(Wf2 x + ...)
//   s  = i*a + f1*s1 + f2*s2
//   o  = sig(Wo x + U1o h1 + U2o h2 + bo)
//   h  = o * tanh(s)
// Masked cells emit zero hidden and memory.
ImageGrid mdlstm_scan(const CellParams& params, const SkewedGrid& s);
ScanResult mdlstm_scan_full(const CellParams& params, const SkewedGrid& s);

// Stability-corrected variant. Lambda gates mix convexly, so memory can
// never outgrow the unit interval reachable from zero boundary states:
//   ls = sig(Wf1 x + U1f1 h1 + U2f1 h2 + bf1)
//   sp = ls*s1 + (1-ls)*s2
//   a  = tanh(Wg x + U1g h1 + U2g h2 + bg)
//   lu = sig(Wf2 x + U1f2 h1 + U2f2 h2 + bf2)
//   s  = lu*sp + (1-lu)*a
//   o1 = sig(Wi x + U1i h1 + U2i h2 + V1 sp + bi)
//   o2 = sig(Wo x + U1o h1 + U2o h2 + V2 sp + bo)
//   h  = o1*tanh(s) + o2*tanh(sp)
// Both output gates receive the mixed previous memory sp, not s.
ImageGrid leakylp_scan(const CellParams& params, const SkewedGrid& s);
ScanResult leakylp_scan_full(const CellParams& params, const SkewedGrid& s);

ImageGrid cell_scan(CellKind kind, const CellParams& params,
                    const SkewedGrid& s);

// Four directions in fixed channel order: right-down, left-down, right-up,
// left-up. Each direction flips the input, scans, flips back; outputs are
// concatenated on the channel axis.
ImageGrid mdlstm_4dir(CellKind kind, const std::array<CellParams, 4>& params,
                      const ImageGrid& g);

// Worst-case memory growth demonstrator: iterates the cell update with both
// predecessor pairs aliased to the previous step (the regime of a packed
// diagonal front), input pinned to 1, double precision. Canonical weights:
// unit cell-input drive, gates driven by bias alone, forget bias as given.
std::vector<double> stability_trace(CellKind kind, int length,
                                    double forget_bias);
// Same chain under explicit parameters (hidden_size may exceed 1); returns
// max |memory| per step.
std::vector<double> stability_trace(CellKind kind, const CellParams& params,
                                    int length, double input_value);

// Flat little-endian container with JSON sidecar (path + ".json") naming
// every block and its offset.
void save_cell_params(const CellParams& p, CellKind kind,
                      const std::string& path);
CellParams load_cell_params(const std::string& path, CellKind* kind = nullptr);

// Raw weight blocks in container order, no header; used by the model file.
void write_cell_blocks(std::ostream& os, const CellParams& p);
void read_cell_blocks(std::istream& is, CellParams& p);

}  // namespace gridpack

#endif
