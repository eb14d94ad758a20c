#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace nd::ini {

using Tree = boost::property_tree::ptree;

Tree read(const std::filesystem::path& path);
Tree read_string(const std::string& text);
/// Writes sections and keys in insertion order.
void write(const Tree& tree, std::ostream& out);

std::optional<std::string> find(const Tree& tree, const std::string& section, const std::string& key);
std::string require(const Tree& tree, const std::string& section, const std::string& key);

double get_double(const Tree& tree, const std::string& section, const std::string& key, double fallback);
long long get_int(const Tree& tree, const std::string& section, const std::string& key, long long fallback);
double require_double(const Tree& tree, const std::string& section, const std::string& key);
long long require_int(const Tree& tree, const std::string& section, const std::string& key);
std::vector<double> get_list(const Tree& tree, const std::string& section, const std::string& key,
                             std::vector<double> fallback);

}  // namespace nd::ini
