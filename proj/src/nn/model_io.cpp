#include "nn/model_io.hpp"

#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "common/ini.hpp"
#include "common/text.hpp"

namespace nd::nn {

namespace {

ini::Tree& section(ini::Tree& t, const std::string& name) {
    return t.put_child(ini::Tree::path_type(name, '\0'), {});
}

std::string codes_to_string(const std::vector<std::int8_t>& codes) {
    std::vector<int> wide(codes.begin(), codes.end());
    return text::join<int>(wide);
}

std::vector<std::int8_t> codes_from(const ini::Tree& t, const std::string& sec, const std::string& key,
                                    std::size_t expected) {
    const auto values = ini::get_list(t, sec, key, {});
    if (values.size() != expected)
        throw Error(ErrorCode::Corrupt, "[" + sec + "] " + key + ": expected " + std::to_string(expected) +
                                            " values, found " + std::to_string(values.size()));
    std::vector<std::int8_t> out;
    out.reserve(values.size());
    for (double v : values) {
        if (v != static_cast<int>(v) || v < -127 || v > 127)
            throw Error(ErrorCode::Corrupt, "[" + sec + "] " + key + ": code out of [-127, 127]");
        out.push_back(static_cast<std::int8_t>(v));
    }
    return out;
}

std::vector<double> reals_from(const ini::Tree& t, const std::string& sec, const std::string& key,
                               std::size_t expected) {
    auto values = ini::get_list(t, sec, key, {});
    if (values.size() != expected)
        throw Error(ErrorCode::Corrupt, "[" + sec + "] " + key + ": expected " + std::to_string(expected) +
                                            " values, found " + std::to_string(values.size()));
    return values;
}

std::size_t size_field(const ini::Tree& t, const std::string& sec, const std::string& key) {
    const auto v = ini::require_int(t, sec, key);
    if (v < 0) throw Error(ErrorCode::Corrupt, "[" + sec + "] " + key + " is negative");
    return static_cast<std::size_t>(v);
}

}  // namespace

void write_network(const Network& net, std::ostream& out, const std::string& provenance) {
    const bool quantized = std::holds_alternative<QuantizedMlp>(net);
    out << "# neurodetect model\n";
    if (!provenance.empty()) out << provenance;

    ini::Tree t;
    auto& head = section(t, "model");
    head.put("format", quantized ? "int8" : "float");
    head.put("input_len", std::to_string(input_len(net)));

    if (quantized) {
        const auto& q = std::get<QuantizedMlp>(net);
        head.put("front_end", q.front_end ? "conv" : "none");
        head.put("layers", std::to_string(q.layers.size()));
        if (q.front_end) {
            auto& c = section(t, "conv");
            c.put("kernels", std::to_string(q.front_end->n_kernels));
            c.put("kernel_len", std::to_string(q.front_end->kernel_len));
            c.put("stride", std::to_string(q.front_end->stride));
            c.put("activation", to_string(q.front_end->activation));
            c.put("scale", text::format_double(q.front_end->kernels.scale));
            c.put("weights", codes_to_string(q.front_end->kernels.codes));
        }
        for (std::size_t i = 0; i < q.layers.size(); ++i) {
            const auto& l = q.layers[i];
            auto& s = section(t, "layer" + std::to_string(i));
            s.put("in", std::to_string(l.in));
            s.put("out", std::to_string(l.out));
            s.put("activation", to_string(l.activation));
            s.put("weight_scale", text::format_double(l.weights.scale));
            s.put("bias_scale", text::format_double(l.biases.scale));
            s.put("weights", codes_to_string(l.weights.codes));
            s.put("biases", codes_to_string(l.biases.codes));
        }
    } else {
        const auto& m = std::get<MlpModel>(net);
        head.put("front_end", m.front_end ? "conv" : "none");
        head.put("layers", std::to_string(m.layers.size()));
        if (m.front_end) {
            auto& c = section(t, "conv");
            c.put("kernels", std::to_string(m.front_end->n_kernels));
            c.put("kernel_len", std::to_string(m.front_end->kernel_len));
            c.put("stride", std::to_string(m.front_end->stride));
            c.put("activation", to_string(m.front_end->activation));
            c.put("weights", text::join<double>(m.front_end->kernels));
        }
        for (std::size_t i = 0; i < m.layers.size(); ++i) {
            const auto& l = m.layers[i];
            auto& s = section(t, "layer" + std::to_string(i));
            s.put("in", std::to_string(l.in));
            s.put("out", std::to_string(l.out));
            s.put("activation", to_string(l.activation));
            s.put("weights", text::join<double>(l.weights));
            s.put("biases", text::join<double>(l.biases));
        }
    }
    ini::write(t, out);
}

void save_network(const Network& net, const std::filesystem::path& path, const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_network(net, out, provenance);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

Network read_network(const std::string& text) {
    const auto t = ini::read_string(text);
    try {
        const auto format = ini::require(t, "model", "format");
        const auto n_in = size_field(t, "model", "input_len");
        const auto n_layers = size_field(t, "model", "layers");
        const auto front = ini::find(t, "model", "front_end").value_or("none");
        if (front != "none" && front != "conv") throw Error(ErrorCode::Corrupt, "unknown front_end '" + front + "'");

        if (format == "int8") {
            QuantizedMlp q;
            q.input_len = n_in;
            if (front == "conv") {
                QuantizedConv c;
                c.n_kernels = size_field(t, "conv", "kernels");
                c.kernel_len = size_field(t, "conv", "kernel_len");
                c.stride = size_field(t, "conv", "stride");
                c.activation = parse_activation(ini::require(t, "conv", "activation"));
                c.kernels.scale = ini::require_double(t, "conv", "scale");
                c.kernels.codes = codes_from(t, "conv", "weights", c.n_kernels * c.kernel_len);
                q.front_end = std::move(c);
            }
            for (std::size_t i = 0; i < n_layers; ++i) {
                const auto sec = "layer" + std::to_string(i);
                QuantizedLayer l;
                l.in = size_field(t, sec, "in");
                l.out = size_field(t, sec, "out");
                l.activation = parse_activation(ini::require(t, sec, "activation"));
                l.weights.scale = ini::require_double(t, sec, "weight_scale");
                l.biases.scale = ini::require_double(t, sec, "bias_scale");
                l.weights.codes = codes_from(t, sec, "weights", l.in * l.out);
                l.biases.codes = codes_from(t, sec, "biases", l.out);
                q.layers.push_back(std::move(l));
            }
            // Dimension checks piggyback on the float validator.
            dequantize_model(q).validate();
            return q;
        }
        if (format == "float") {
            MlpModel m;
            m.input_len = n_in;
            if (front == "conv") {
                ConvFrontEnd c;
                c.n_kernels = size_field(t, "conv", "kernels");
                c.kernel_len = size_field(t, "conv", "kernel_len");
                c.stride = size_field(t, "conv", "stride");
                c.activation = parse_activation(ini::require(t, "conv", "activation"));
                c.kernels = reals_from(t, "conv", "weights", c.n_kernels * c.kernel_len);
                m.front_end = std::move(c);
            }
            for (std::size_t i = 0; i < n_layers; ++i) {
                const auto sec = "layer" + std::to_string(i);
                DenseLayer l;
                l.in = size_field(t, sec, "in");
                l.out = size_field(t, sec, "out");
                l.activation = parse_activation(ini::require(t, sec, "activation"));
                l.weights = reals_from(t, sec, "weights", l.in * l.out);
                l.biases = reals_from(t, sec, "biases", l.out);
                m.layers.push_back(std::move(l));
            }
            m.validate();
            return m;
        }
        throw Error(ErrorCode::Corrupt, "unknown model format '" + format + "'");
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw Error(ErrorCode::Corrupt, e.what());
        throw;
    }
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return read_network(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.detail());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace nd::nn
