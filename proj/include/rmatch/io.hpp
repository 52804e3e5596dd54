#pragma once

#include "rmatch/density.hpp"
#include "rmatch/mcsim.hpp"
#include "rmatch/sbfamily.hpp"

#include <string>

namespace rmatch {

/// CSV columns: left,right,value,value_decimal (canonical scalar text plus a
/// 20-significant-digit decimal for plotting).
std::string density_csv(const StepDensity& f);

/// CSV columns: alpha,p,pi0_exact,pi0_decimal,status,M.
std::string surface_csv(const std::vector<SurfaceRow>& rows);

/// CSV columns: left,right,m_alpha,M,word,y_formula (plus gap rows).
std::string scan_csv(const ScanResult& scan);

/// CSV columns: left,right,mass,density_estimate,stderr.
std::string histogram_csv(const Histogram& h);

std::string svg_step_plot(const StepDensity& f, const std::string& title);
std::string svg_histogram_overlay(const Histogram& h, const StepDensity* exact,
                                  const std::string& title);
std::string svg_heatmap(const std::vector<SurfaceRow>& rows, const std::string& title);

/// JSON description of a finite piecewise map / random system
/// (ambient, branches with forms, coefficients in canonical text,
/// boundary flags; system adds the probability vector).
std::string map_to_json(const PiecewiseMap& map);
std::string system_to_json(const RandomSystem& sys);
PiecewiseMap map_from_json(const std::string& text);
RandomSystem system_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);

}  // namespace rmatch
