#include "common/ini.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "common/error.hpp"
#include "common/text.hpp"

namespace nd::ini {

namespace {

std::string qualified(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

}  // namespace

Tree read_string(const std::string& text) {
    // '#' comments are blanked (not removed) so parser line numbers stay valid.
    std::string cleaned;
    cleaned.reserve(text.size());
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (!text::trim(line).starts_with('#')) cleaned += line;
        cleaned += '\n';
    }
    Tree tree;
    std::istringstream in(cleaned);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(e.line(), e.message());
    }
    return tree;
}

Tree read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return read_string(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.detail());
    }
}

void write(const Tree& tree, std::ostream& out) {
    for (const auto& [section, body] : tree) {
        out << '[' << section << "]\n";
        for (const auto& [key, value] : body) out << key << " = " << value.data() << '\n';
        out << '\n';
    }
}

std::optional<std::string> find(const Tree& tree, const std::string& section, const std::string& key) {
    const auto sec = tree.get_child_optional(boost::property_tree::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto value = sec->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
    if (!value) return std::nullopt;
    return std::string(text::trim(*value));
}

std::string require(const Tree& tree, const std::string& section, const std::string& key) {
    auto v = find(tree, section, key);
    if (!v) throw Error(ErrorCode::Config, "missing field " + qualified(section, key));
    return *v;
}

double require_double(const Tree& tree, const std::string& section, const std::string& key) {
    double v = 0.0;
    if (!text::parse_double(require(tree, section, key), v))
        throw Error(ErrorCode::Config, "field " + qualified(section, key) + " is not a number");
    return v;
}

long long require_int(const Tree& tree, const std::string& section, const std::string& key) {
    long long v = 0;
    if (!text::parse_int(require(tree, section, key), v))
        throw Error(ErrorCode::Config, "field " + qualified(section, key) + " is not an integer");
    return v;
}

double get_double(const Tree& tree, const std::string& section, const std::string& key, double fallback) {
    return find(tree, section, key) ? require_double(tree, section, key) : fallback;
}

long long get_int(const Tree& tree, const std::string& section, const std::string& key, long long fallback) {
    return find(tree, section, key) ? require_int(tree, section, key) : fallback;
}

std::vector<double> get_list(const Tree& tree, const std::string& section, const std::string& key,
                             std::vector<double> fallback) {
    auto v = find(tree, section, key);
    if (!v) return fallback;
    try {
        return text::parse_double_list(*v, qualified(section, key));
    } catch (const Error& e) {
        throw Error(ErrorCode::Config, e.what());
    }
}

}  // namespace nd::ini
