#include "synth/recording.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "common/text.hpp"

namespace nd::synth {

void Recording::validate() const {
    if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) throw Error(ErrorCode::InvalidArgument, "fs_hz must be positive");
    if (!(full_scale_uv > 0.0)) throw Error(ErrorCode::InvalidArgument, "full_scale_uv must be positive");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i]))
            throw Error(ErrorCode::Corrupt, "sample " + std::to_string(i) + " is not finite");
        if (std::abs(samples[i]) > full_scale_uv)
            throw Error(ErrorCode::Corrupt, "sample " + std::to_string(i) + " exceeds full scale");
    }
    const double dur = duration_s();
    double prev_end = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (!(e.start_s >= 0.0 && e.start_s < e.end_s && e.end_s <= dur + 1e-9))
            throw Error(ErrorCode::InvalidArgument, "event " + std::to_string(i) + " is outside the recording");
        if (e.start_s < prev_end)
            throw Error(ErrorCode::InvalidArgument, "event " + std::to_string(i) + " overlaps or is out of order");
        prev_end = e.end_s;
    }
}

std::vector<std::uint8_t> sample_labels(const Recording& rec) {
    std::vector<std::uint8_t> labels(rec.samples.size(), 0);
    for (const auto& e : rec.events) {
        const auto first = static_cast<std::size_t>(std::ceil(e.start_s * rec.fs_hz - 1e-9));
        const auto last = static_cast<std::size_t>(std::ceil(e.end_s * rec.fs_hz - 1e-9));
        for (std::size_t n = first; n < std::min(last, labels.size()); ++n) labels[n] = 1;
    }
    return labels;
}

RecordingPaths recording_paths(const std::filesystem::path& base) {
    auto stem = base;
    if (stem.extension() == ".hdr") stem.replace_extension();
    const auto name = stem.filename().string();
    const auto dir = stem.parent_path();
    return {dir / (name + ".hdr"), dir / (name + ".f32"), dir / (name + ".events.csv")};
}

std::string format_annotations(const std::vector<EventAnnotation>& events) {
    std::string out = "start_s,end_s,label\n";
    for (const auto& e : events)
        out += text::format_double(e.start_s) + "," + text::format_double(e.end_s) + "," + e.label + "\n";
    return out;
}

std::vector<EventAnnotation> parse_annotations(const std::string& body) {
    std::vector<EventAnnotation> out;
    std::istringstream in(body);
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.starts_with('#') || t == "start_s,end_s,label") continue;
        const auto fields = text::split(t, ',');
        if (fields.size() != 3) throw ParseError(line_no, "expected start_s,end_s,label");
        EventAnnotation e;
        if (!text::parse_double(fields[0], e.start_s)) throw ParseError(line_no, "bad start_s");
        if (!text::parse_double(fields[1], e.end_s)) throw ParseError(line_no, "bad end_s");
        if (!(e.start_s >= 0.0 && e.start_s < e.end_s)) throw ParseError(line_no, "event must have 0 <= start < end");
        if (fields[2].empty()) throw ParseError(line_no, "empty label");
        e.label = std::string(fields[2]);
        out.push_back(std::move(e));
    }
    return out;
}

void save_recording(const Recording& rec, const std::filesystem::path& base, const std::string& provenance) {
    rec.validate();
    const auto paths = recording_paths(base);
    {
        std::ofstream hdr(paths.header, std::ios::binary);
        if (!hdr) throw Error(ErrorCode::Io, "cannot write " + paths.header.string());
        hdr << "# neurodetect recording\n" << provenance;
        hdr << "fs_hz = " << text::format_double(rec.fs_hz) << '\n';
        hdr << "n_samples = " << rec.samples.size() << '\n';
        hdr << "full_scale_uv = " << text::format_double(rec.full_scale_uv) << '\n';
        if (!hdr) throw Error(ErrorCode::Io, "write failed for " + paths.header.string());
    }
    {
        std::ofstream bin(paths.payload, std::ios::binary);
        if (!bin) throw Error(ErrorCode::Io, "cannot write " + paths.payload.string());
        std::vector<char> bytes(rec.samples.size() * 4);
        for (std::size_t i = 0; i < rec.samples.size(); ++i) {
            const auto u = std::bit_cast<std::uint32_t>(rec.samples[i]);
            for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((u >> (8 * b)) & 0xff);
        }
        bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!bin) throw Error(ErrorCode::Io, "write failed for " + paths.payload.string());
    }
    {
        std::ofstream csv(paths.annotations, std::ios::binary);
        if (!csv) throw Error(ErrorCode::Io, "cannot write " + paths.annotations.string());
        csv << format_annotations(rec.events);
        if (!csv) throw Error(ErrorCode::Io, "write failed for " + paths.annotations.string());
    }
}

Recording load_recording(const std::filesystem::path& path) {
    const auto paths = recording_paths(path);
    Recording rec;
    std::size_t n_samples = 0;
    bool have_fs = false, have_n = false, have_fs_uv = false;
    {
        std::ifstream hdr(paths.header);
        if (!hdr) throw Error(ErrorCode::Io, "cannot open " + paths.header.string());
        std::size_t line_no = 0;
        for (std::string line; std::getline(hdr, line);) {
            ++line_no;
            const auto t = text::trim(line);
            if (t.empty() || t.starts_with('#')) continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) throw ParseError(line_no, paths.header.string() + ": expected key = value");
            const auto key = text::trim(t.substr(0, eq));
            const auto value = text::trim(t.substr(eq + 1));
            bool ok = true;
            if (key == "fs_hz")
                ok = have_fs = text::parse_double(value, rec.fs_hz);
            else if (key == "n_samples")
                ok = have_n = text::parse_int(value, n_samples);
            else if (key == "full_scale_uv")
                ok = have_fs_uv = text::parse_double(value, rec.full_scale_uv);
            if (!ok) throw ParseError(line_no, paths.header.string() + ": bad value for " + std::string(key));
        }
        if (!have_fs || !have_n || !have_fs_uv)
            throw Error(ErrorCode::Corrupt, paths.header.string() + ": header needs fs_hz, n_samples, full_scale_uv");
    }
    {
        std::ifstream bin(paths.payload, std::ios::binary | std::ios::ate);
        if (!bin) throw Error(ErrorCode::Io, "cannot open " + paths.payload.string());
        const auto size = static_cast<std::size_t>(bin.tellg());
        if (size != n_samples * 4)
            throw Error(ErrorCode::Corrupt, paths.payload.string() + ": header declares " + std::to_string(n_samples) +
                                                " samples but payload holds " + std::to_string(size / 4) +
                                                (size % 4 ? " and a partial value" : ""));
        bin.seekg(0);
        std::vector<unsigned char> bytes(size);
        bin.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
        if (!bin) throw Error(ErrorCode::Io, "read failed for " + paths.payload.string());
        rec.samples.resize(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
            rec.samples[i] = std::bit_cast<float>(u);
        }
    }
    {
        std::ifstream csv(paths.annotations, std::ios::binary);
        if (!csv) throw Error(ErrorCode::Io, "cannot open " + paths.annotations.string());
        std::stringstream buf;
        buf << csv.rdbuf();
        try {
            rec.events = parse_annotations(buf.str());
        } catch (const ParseError& e) {
            throw ParseError(e.line(), paths.annotations.string() + ": " + e.detail());
        }
    }
    rec.validate();
    return rec;
}

}  // namespace nd::synth
