#pragma once

#include "randers_foliate/foliated.hpp"

namespace rf {

// g at y = n(x): (1+β(n))a + β⊗β - β(n) n♭⊗n♭ + β⊗n♭ + n♭⊗β.
Mat g_from_normal(const Mat& a, const Vec& beta, const Vec& n);

Field g_metric_field(const FoliatedRandersManifold& M, const BarGeometry& bar);

// Leaf-frame quantities shared by the formula routes at one node (all vectors are leaf-frame coordinates).
struct FormulaInputs {
  double c = 1.0, c_hat = 1.0;
  double n_c_c_hat = 0.0;  // n(c ĉ)
  double n_c_hat = 0.0;    // n(ĉ)
  double N_c = 0.0;        // N(c)
  double bt_c_hat = 0.0;   // β♯⊤(ĉ)
  Mat Abar;                // Ā
  Vec Zbar;                // Z̄
  Vec bt;                  // β♯⊤
  Vec grad_c_hat;          // ∇̄^⊤ĉ
  Vec grad_c;              // ∇̄^⊤c
  Mat Def;                 // Def_{β♯}^⊤
  Vec U;                   // ĉ^{-1}(∇̄_n β♯⊤)^⊤ - c Z̄
};

// The comparison formula as stated carries c ĉ² where the bracket term ⟨[u,n],n⟩β(v) gives c² ĉ.
// The whole correction is absorbed by U ↦ U + (1 - c/ĉ)(Ā(β♯⊤) + c Z̄); for ∇̄β = 0 this is U = -c Z̄.
FormulaInputs with_corrected_u(const FormulaInputs& in);

// Rank-one pieces of c·A^g - Ā - δ I - ĉ^{-1}Def^⊤ (all in the leaf frame).
struct RankOnePieces {
  double delta = 0.0;  // δ = -½ c^{-1} ĉ^{-2} n(cĉ)
  Vec U1, U2;
  double a3 = 0.0;
  Mat A1, A2, A3;  // U1♭⊗β♯⊤, U2⊗β^⊤, a3 β^⊤⊗β♯⊤
};

// c·A^g from the general comparison formula, valid for all β.
Mat cAg_initial(const FormulaInputs& in);
// c·A^g from the ⊥β-split form; needs ‖β♯⊤‖ >= 1e-8.
Mat cAg_split(const FormulaInputs& in);
// The display for β(N) = 0 and ∇̄β = 0.
Mat cAg_parallel_orthogonal(const FormulaInputs& in);
// Pieces taken from the split form (general β) and from the parallel-β closed forms.
RankOnePieces rank_one_pieces(const FormulaInputs& in);
RankOnePieces rank_one_pieces_parallel(const FormulaInputs& in);

Vec z_formula(const FormulaInputs& in);

// 2C̄ of the C♯ formula; `use_c_hat` selects ∇̄^⊤ĉ instead of ∇̄^⊤c in the first bracket (both readings occur).
Mat cbar_twice(const FormulaInputs& in, bool use_c_hat);
// C♯_n as an operator on the leaf frame from the formula (cĉ)C♯_n = C̄ + c^{-2}(β^⊤∘C̄)⊗β♯⊤.
Mat csharp_n_formula(const FormulaInputs& in, bool use_c_hat);
// 2C_n(u, v, Z) as a bilinear form on the leaf frame from the expanded display.
Mat cn_z_display(const FormulaInputs& in);
// 2C̄ recomputed from C_n = (cĉ/2)·sym(β⊗(⟨,⟩ - β⊗β)) at α(n) = 1 and the Z formula:
// β⊗Z̄ + Z̄⊗β - ĉ^{-1}(β⊗dĉ + dĉ⊗β) + c^{-2}(β(Z̄) - ĉ^{-1}β♯⊤(ĉ))(I - β⊗β♯⊤).
Mat cbar_twice_derived(const FormulaInputs& in);
// C♯_ν = (cĉ)C♯_n = C̄ + c^{-2}(β^⊤∘C̄)⊗β♯⊤ for a given 2C̄.
Mat csharp_nu_from_cbar_twice(const FormulaInputs& in, const Mat& cbar2);

struct ExtrinsicBundle {
  Scheme scheme = Scheme::spectral;
  Field g;              // {D, D}
  Field nu;             // ν = n/(cĉ), {D}
  Field n;              // {D}
  Field g_christoffel;  // {D, D, D}
  Field Ag_direct;      // {m, m}, leaf frame
  Field Ag_formula;     // {m, m}, split form with corrected U (initial form where β♯⊤ = 0)
  Field Ag_initial;     // {m, m}, initial form with corrected U everywhere
  Field Ag_stated;     // {m, m}, formula with U as stated
  Field Z_direct;       // {m}
  Field Z_formula;      // {m}
  Field Z_direct_coord; // {D}
  Field Csharp_direct;  // C♯_ν = g-dual of C_ν(·,·,Z), {m, m}
  Field Csharp_formula;  // C♯_ν from the recomputed 2C̄
  Field Csharp_stated;  // C♯_ν from the stated 2C̄ with ∇̄^⊤c
  Field Csharp_stated_alt;  // same with ∇̄^⊤ĉ
  Field Csharp_n_direct;  // g-dual of C_n(·,·,Z), for the C♯_n/C♯_ν scaling
  Field Cn_bilinear;     // C_n(·,·,Z_formula) as bilinear form, {m, m}
  Field Cn_display;      // ½ of the expanded 2C_n(u,v,Z) display
  Field Cn_derived;      // ½ of the recomputed 2C̄
  Field A;               // A^g + C♯_ν (direct routes)
  Field gram;            // g restricted to the leaf frame, {m, m}
  Field delta;           // δ
  Field inputs_c, inputs_c_hat;
  std::vector<FormulaInputs> inputs;  // per node, U as stated (empty at masked nodes)
};

ExtrinsicBundle build_extrinsic(const FoliatedRandersManifold& M, const BarGeometry& bar);

// Antisymmetric part of g(∇_u Z, v) in the leaf frame (needs no excision).
Field codazzi_residual_g(const FoliatedRandersManifold& M, const BarGeometry& bar, const ExtrinsicBundle& X);

// Max over active nodes of the g-asymmetry of an operator field given in the leaf frame.
double g_asymmetry(const FoliatedRandersManifold& M, const ExtrinsicBundle& X, const Field& op);

// Max over active nodes of |a - b| (Frobenius per node).
double max_difference(const FoliatedRandersManifold& M, const Field& a, const Field& b);

// Per-node least-squares ratio ⟨x, y⟩/⟨y, y⟩ for operator fields, NaN where y vanishes.
std::vector<double> ratio_field(const FoliatedRandersManifold& M, const Field& x, const Field& y);

}  // namespace rf
