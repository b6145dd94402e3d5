#pragma once

#include <string>

#include "reeblab/asymptotics.hpp"
#include "reeblab/beltrami.hpp"
#include "reeblab/contact.hpp"
#include "reeblab/leaves.hpp"
#include "reeblab/profiles.hpp"
#include "reeblab/torus_cr.hpp"

namespace reeblab::io {

// Profile JSON schema:
//   {"kind": "example1"|"example2"|"spline", "T": x, "k": x, "delta": x,
//    "r_max": x, "knots": [[r, g1, dg1, g2, dg2], ...]}
// Schema violations throw with a field-level message.
std::string profile_to_json(const BindingProfile& p);
BindingProfile profile_from_json(const std::string& text);
BindingProfile parse_profile_file(const std::string& path);
void write_profile_file(const BindingProfile& p, const std::string& path);

// GridField binary: magic "QCG1", little-endian u32 n, f64 L, then n*n
// interleaved f64 (re, im) row-major. Write-then-read is bit exact.
void write_grid(const GridField& g, const std::string& path);
GridField read_grid(const std::string& path);

// HalfCylinderField binary: magic "HCF1", u32 n_rows, u32 n_t, then the
// f64 s-grid and row-major interleaved (re, im) samples.
void write_half_cylinder(const HalfCylinderField& f, const std::string& path);
HalfCylinderField read_half_cylinder(const std::string& path);

// TorusField: u32 header length, JSON header {"N":, "real_flag":}, then
// little-endian f64 pairs row-major over (m, n).
void write_torus_field(const TorusField& f, const std::string& path);
TorusField read_torus_field(const std::string& path);

// CRSolution bundle: a directory holding zeta/gamma component fields plus a
// residual-report JSON.
void write_cr_solution(const CRSolution& sol, const std::string& dir);
CRSolution read_cr_solution(const std::string& dir);

// LeafProfile CSV (columns s,r,a) plus a JSON sidecar with the fitted data.
void write_leaf_csv(const LeafProfile& lp, const std::string& path);
void write_leaf_meta(const LeafProfile& lp, const std::string& path);

// Loop CSV: header t,x,y.
void write_loop_csv(const LoopField& loop, const std::string& path);
LoopField read_loop_csv(const std::string& path);

// PageSample CSV: header a,b.
PageSample read_page_csv(const std::string& path);

// Canonical JSON: sorted keys, shortest round-trip floats, no whitespace
// variation; used for all machine-readable reports.
std::string canonical_json(const std::string& already_json_text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace reeblab::io
