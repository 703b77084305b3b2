#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wrmg/forms.hpp"
#include "wrmg/spaces.hpp"
#include "wrmg/sparse.hpp"

namespace wrmg {

/// Space-time prolongation P = I (x) P_h between nested levels that share the
/// temporal space. P_h interpolates each field separately (block diagonal
/// over fields); restriction is the transpose of the same storage.
class TransferPair {
 public:
  /// When boundary conditions are given, the pair works in correction mode:
  /// rows of constrained fine DoFs and columns of constrained coarse DoFs are
  /// zero.
  TransferPair(std::shared_ptr<const SpaceTimeSpace> coarse, std::shared_ptr<const SpaceTimeSpace> fine,
               const BoundaryConditions* coarse_bcs = nullptr, const BoundaryConditions* fine_bcs = nullptr);

  const SpaceTimeSpace& coarse() const { return *coarse_; }
  const SpaceTimeSpace& fine() const { return *fine_; }
  /// Mixed spatial interpolation matrix (fine spatial size x coarse spatial size).
  const CsrMatrix& spatial() const { return p_; }

  /// fine = P coarse
  void prolong(std::span<const double> coarse, std::span<double> fine) const;
  /// coarse = P^T fine
  void restrict_to_coarse(std::span<const double> fine, std::span<double> coarse) const;
  /// Coarse nodal values read from the coincident fine nodes (every field).
  void inject(std::span<const double> fine, std::span<double> coarse) const;

 private:
  std::shared_ptr<const SpaceTimeSpace> coarse_, fine_;
  CsrMatrix p_;
  std::vector<int> injection_;  // coarse mixed DoF -> fine mixed DoF
};

/// Builds the pair without boundary handling (pure interpolation).
TransferPair build_prolongation(std::shared_ptr<const SpaceTimeSpace> coarse,
                                std::shared_ptr<const SpaceTimeSpace> fine);

}  // namespace wrmg
