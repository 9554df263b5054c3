#pragma once

#include <memory>
#include <vector>

#include "mfl/core.hpp"
#include "mfl/potential.hpp"
#include "mfl/qdyn.hpp"

namespace mfl {

// Dense operator on the N-fold tensor lattice (particle 1 slowest).
using BigOperator = CMatrix;

// I ⊗ .. ⊗ A ⊗ .. ⊗ I with A in slot k (1-based).
BigOperator jk_embed(const CMatrix& A, int k, int N);

// Lazy linear map from one-particle operators to N-particle operators.
class ObservableMap {
public:
    enum class Kind { empirical_in, empirical_t, rmap, adstar, interaction, sum, scaled };
    struct Node;

    Kind kind() const;
    int N() const;
    const Grid& grid() const;
    BigOperator apply(const CMatrix& A) const;
    BigOperator apply(const GridOperator& A) const { return apply(A.mat); }

    explicit ObservableMap(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    const std::shared_ptr<const Node>& ptr() const { return node_; }

private:
    std::shared_ptr<const Node> node_;
};

ObservableMap operator+(const ObservableMap& a, const ObservableMap& b);
ObservableMap operator-(const ObservableMap& a, const ObservableMap& b);
ObservableMap operator*(cplx s, const ObservableMap& a);

// A -> (1/N) sum_k J_k A
ObservableMap empirical_in(const Grid& g, int N);
// A -> U (M_in A) U^dagger; U must be unitary
ObservableMap empirical_t(const Grid& g, int N, const BigOperator& U);
// A -> trace(R A) I
ObservableMap rmap(const GridOperator& R, int N);
// A -> -inner[D, A]
ObservableMap ad_star_map(const GridOperator& D, const ObservableMap& inner);
// A -> sum_m V_m (L1(E_m^*) L2(E_m A) - L2(A E_m) L1(E_m^*))
ObservableMap interaction_map(const PotentialSeries& V, const ObservableMap& L1, const ObservableMap& L2);

BigOperator ad_star(const GridOperator& D, const ObservableMap& L, const GridOperator& A);
BigOperator interaction(const PotentialSeries& V, const ObservableMap& L1, const ObservableMap& L2,
                        const GridOperator& A);

// Permutations of tensor slots acting on dense operators.
BigOperator swap_slots(const BigOperator& F, int M, int N, int k, int l);  // P_kl F P_kl, 0-based
double swap_asymmetry(const BigOperator& F, int M, int N);                 // max over k<l of |P F P - F|
BigOperator symmetrize(const BigOperator& F, int M, int N);                // average over S_N

struct PairCheck {
    cplx lhs;
    cplx rhs;
    double residual;
};

struct AlgebraSetup {
    Grid grid;
    int N = 2;
    PotentialSeries V;
    double hbar = 1.0;
    CVector psi_in;  // one-particle state, sum |psi|^2 dx = 1
};

// tr(A F_{N:1}(t)) against tr((M_N(t) A) F_in)
PairCheck heisenberg_duality_check(const AlgebraSetup& s, double t, const GridOperator& A);

// Interaction term of the first BBGKY equation against the twisted interaction, at time t.
PairCheck hierarchy_interaction_check(const AlgebraSetup& s, double t, const GridOperator& A);

// tr((M A)(M B) F) against its marginal expansion; F must be slot-symmetric.
double quadratic_marginal_check(int N, const CMatrix& A, const CMatrix& B, const BigOperator& F);

// Central-difference residual of the empirical-measure evolution equation at time t.
double empirical_equation_residual(const AlgebraSetup& s, const GridOperator& A, double t, double delta);

// Same residual with the map A -> tr(R(t) A) I taken from a Hartree trajectory; delta must be a
// multiple of the trajectory step.
double hartree_as_special_case(const HartreeTrajectory& tr, const PotentialSeries& V, const GridOperator& A,
                               double t, double delta, int N = 1);

// ||((M_in - R) B) sqrt(F)||_HS^2 against its marginal expansion.
struct Fluctuation {
    double lhs;
    double rhs;
    double residual;
};
Fluctuation initial_fluctuation_identity(int N, const CMatrix& B, const BigOperator& F, const GridOperator& R);
// Pure F = |Psi><Psi| without forming any N-body matrix.
Fluctuation initial_fluctuation_identity(const NBodyState& psi, const CMatrix& B, const GridOperator& R);

// (M_in B) Psi on the tensor grid
std::vector<cplx> apply_empirical(const std::vector<cplx>& amps, int M, int N, const CMatrix& B);

}  // namespace mfl
