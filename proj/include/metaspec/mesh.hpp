#pragma once

// Finite state space S with a partition of [-R, R) into cells I_x = [a_x, b_x),
// the well decomposition, and the deterministic one-step map T.

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "metaspec/potential.hpp"

namespace metaspec {

/// How build_uniform places the minima on the grid.
enum class Alignment {
  /// Each minimum gets a cell of the nominal width centred on it; the
  /// stretches between minima and barriers are split into equal cells.
  centered,
  /// Plain grid of N equal cells; each minimum replaces the nearest centre and
  /// each interior maximum moves the nearest cell boundary.
  nearest,
};

Alignment parse_alignment(std::string_view name);
std::string_view to_string(Alignment a);

struct Mesh {
  Potential potential;
  double R = 0.0;
  double h = 0.0;
  double delta = 0.0;  // every cell is at most delta/2 wide
  double gamma = 0.0;  // 1/R + h + delta <= gamma
  std::vector<double> states{};
  std::vector<double> lower{};    // a_x
  std::vector<double> upper{};    // b_x
  std::vector<double> landing{};  // x - h U'(x)
  std::vector<int> well{};        // 1-based well of each state
  std::vector<std::size_t> target{};         // index of T x
  std::vector<std::size_t> minima_index{};   // position of m_i in states

  std::size_t size() const { return states.size(); }
  std::size_t wells() const { return minima_index.size(); }
  bool is_minimum(std::size_t k) const;
};

/// Index of the cell containing x in [-R, R); a point on a boundary belongs to
/// the cell on its right. Points outside clamp to the end cells.
std::size_t cell_of(const Mesh& m, double x);

/// Uniform mesh with N cells over [-R, R) and time step h.
/// Throws BuildError listing the states that violate x - hU'(x) notin I_x.
Mesh build_uniform(const Potential& p, double R, std::size_t N, double h,
                   Alignment align = Alignment::centered);

/// Mesh from the preimage-band recipe for a budget gamma: minima cells of
/// width delta/2, bands z_{k+1} = (id - hU')^{-1}(z_k) subdivided below delta/2.
Mesh build_adaptive(const Potential& p, double gamma);

/// Rechecks every structural invariant; throws StructuralError on the first
/// violation.
void validate(const Mesh& m);

/// max over x of the number of T-steps needed to reach a minimum.
std::size_t t_max(const Mesh& m);

/// D = min over x of the distance from x - hU'(x) to the endpoints of the cell
/// it lands in.
double min_clearance(const Mesh& m);

/// p^eps = eps^alpha h D^(-alpha).
double p_eps(const Mesh& m, double alpha, double epsilon);

/// Text table: index state a b well target.
void write_table(std::ostream& os, const Mesh& m);

}  // namespace metaspec
