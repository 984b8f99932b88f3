#pragma once

#include <string>

#include "pflow/linearize.hpp"
#include "pflow/netfile.hpp"
#include "pflow/restore.hpp"
#include "pflow/sweep.hpp"

namespace pflow {

/// Report renderers. Every function returns the full report text, rendered
/// deterministically: fixed column formats, nodes ascending, phases a<b<c,
/// customers ascending. Identical inputs give byte-identical output.

std::string render_solve_report(const NetworkDocument& doc,
                                const Assignment& asg, const SolveResult& res,
                                const SweepOptions& opts);

std::string render_fit_report(const FitRegion& region, const LinCoeffs& lsm,
                              const LinCoeffs& cbm);

std::string render_restore_report(const NetworkDocument& doc,
                                  const RestoreReport& report,
                                  const SweepOptions& opts);

std::string render_compare_report(const NetworkDocument& doc,
                                  const Assignment& asg,
                                  const SolveResult& ntupf,
                                  const std::map<int, Vector3cd>& ltupf_voltage,
                                  const CompareResult& cmp);

}  // namespace pflow
