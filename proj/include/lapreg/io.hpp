#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "lapreg/inference.hpp"
#include "lapreg/spectral.hpp"

namespace lapreg::io {

/// 12 significant digits, %g style.
std::string format_number(double x);
/// x rounded to 12 significant digits, so JSON output carries the same precision.
double round12(double x);

/// CSV of "vertex,value" rows, optional header; vertices must cover 1..n exactly once.
Eigen::VectorXd read_vertex_values(std::istream& in, std::size_t n);
Eigen::VectorXd load_vertex_values(const std::filesystem::path& path, std::size_t n);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string join_numbers(std::span<const double> values, char sep = ',');

nlohmann::json to_json(const GeometryFit& fit);
nlohmann::json to_json(const PosteriorSummary& summary);
/// "vertex,mean,variance" rows.
std::string posterior_csv(const PosteriorSummary& summary);

}  // namespace lapreg::io
