#pragma once

// Exact diagonalization of the two W_X sectors and the tunneling splitting
// between their ground states.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tfim/chain.hpp"
#include "tfim/lanczos.hpp"

namespace tfim {

/// How a splitting was obtained.
enum class Method { dense, lanczos, closed_form, resolvent, free_fermion };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

namespace flags {
inline constexpr std::string_view precision_limited = "precision_limited";
inline constexpr std::string_view non_perturbative = "non_perturbative";
inline constexpr std::string_view diagonal_short_circuit = "diagonal_short_circuit";
}  // namespace flags

struct SplittingRecord {
  ChainSpec spec;
  double e_even = 0.0;  // ground energy of the W_X = +1 sector
  double e_odd = 0.0;   // ground energy of the W_X = -1 sector
  double delta_e = 0.0;
  ParitySector lower_sector = ParitySector::even();
  std::optional<double> excitation_gap;  // third level minus the lowest
  Method method = Method::dense;
  std::vector<std::string> flags;

  bool has_flag(std::string_view flag) const;
};

nlohmann::json to_json(const SplittingRecord& record);

enum class EdRoute { automatic, dense, lanczos };

struct EdOptions {
  EdRoute route = EdRoute::automatic;
  /// automatic route uses dense diagonalization up to this many sites
  int dense_auto_max_sites = 10;
  Limits limits{};
  LanczosOptions lanczos{};
  /// solve the two sectors on separate threads
  bool concurrent = true;
};

struct SectorSolution {
  ParitySector sector = ParitySector::even();
  /// lowest eigenvalues of the sector, ascending
  std::vector<double> energies;
  /// ground energy relative to the ferromagnetic energy -J*bonds, refined by
  /// a Rayleigh quotient of the shifted operator
  double ground_offset = 0.0;
  /// ground eigenvector in the sector basis, largest component positive
  Eigen::VectorXd ground_vector;
  double residual = 0.0;
  Method method = Method::dense;
};

/// Lowest `count` eigenpairs of one sector.
SectorSolution solve_sector(const ChainSpec& spec, ParitySector sector, int count, const EdOptions& options = {});

struct SectorGround {
  double energy;
  StateVector state;  // sector basis
  double residual;
};

SectorGround sector_ground(const ChainSpec& spec, ParitySector sector, const EdOptions& options = {});

/// |E_odd - E_even| from two independent sector solves.
SplittingRecord tunneling_splitting_ed(const ChainSpec& spec, const EdOptions& options = {});

struct Level {
  double energy;
  ParitySector sector;
};

/// `count` lowest levels of the full spectrum, merged from both sectors.
std::vector<Level> low_spectrum(const ChainSpec& spec, int count, const EdOptions& options = {});

}  // namespace tfim
