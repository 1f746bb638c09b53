#include "adaffect/frames.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace adaffect {

namespace {

// Next whitespace-separated token, skipping '#' comment lines.
std::string ppm_token(std::istream& in)
{
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok += static_cast<char>(c);
    }
    return tok;
}

} // namespace

Frame read_ppm(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    if (ppm_token(in) != "P6") throw ParseError("'" + path + "': not a binary PPM (P6)");

    auto parse_dim = [&](const char* what) {
        const std::string tok = ppm_token(in);
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (tok.empty() || *end != '\0' || v <= 0)
            throw ParseError("'" + path + "': bad " + what + " '" + tok + "'");
        return static_cast<int>(v);
    };
    Frame f;
    f.width = parse_dim("width");
    f.height = parse_dim("height");
    const int maxval = parse_dim("maxval");
    if (maxval > 255)
        throw ParseError("'" + path + "': 16-bit PPM not supported (maxval " +
                         std::to_string(maxval) + ")");
    // header ends with the single whitespace byte already consumed by ppm_token

    const size_t n = f.pixel_count() * 3;
    f.rgb.resize(n);
    in.read(reinterpret_cast<char*>(f.rgb.data()), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n)
        throw ParseError("'" + path + "': truncated pixel data");
    return f;
}

void write_ppm(const Frame& frame, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.rgb.data()),
              static_cast<std::streamsize>(frame.rgb.size()));
}

FrameSequence read_frames(const std::string& dir)
{
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ParseError("'" + dir + "' is not a directory");

    std::vector<std::pair<double, fs::path>> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".ppm") continue;
        const std::string stem = e.path().stem().string();
        char* end = nullptr;
        const double ts = std::strtod(stem.c_str(), &end);
        if (stem.empty() || *end != '\0')
            throw ParseError("frame '" + e.path().string() +
                             "': filename must be <seconds>.ppm");
        entries.emplace_back(ts, e.path());
    }
    if (entries.empty()) throw ParseError("'" + dir + "': no .ppm frames");
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    FrameSequence seq;
    for (const auto& [ts, p] : entries) {
        if (!seq.timestamps_s.empty() && ts <= seq.timestamps_s.back())
            throw ValidationError("'" + dir + "': timestamps not strictly increasing at " +
                                  p.string());
        Frame f = read_ppm(p.string());
        if (!seq.frames.empty() &&
            (f.width != seq.frames.front().width || f.height != seq.frames.front().height))
            throw ValidationError("'" + dir + "': mixed frame dimensions at " + p.string());
        seq.frames.push_back(std::move(f));
        seq.timestamps_s.push_back(ts);
    }
    return seq;
}

} // namespace adaffect
