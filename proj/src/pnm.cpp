#include "cnchtv/pnm.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace cnchtv {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) continue;
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
            tok.push_back(static_cast<char>(in.get()));
        }
        return tok;
    }
    return tok;
}

long parse_header_int(std::istream& in, const std::string& field, const std::string& path) {
    const std::string tok = next_token(in);
    if (tok.empty()) {
        throw FormatError(path + ": truncated header, missing " + field);
    }
    try {
        size_t pos = 0;
        const long value = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return value;
    } catch (const std::exception&) {
        throw FormatError(path + ": malformed " + field + " '" + tok + "'");
    }
}

std::uint8_t quantize(double v) {
    const double r = std::round(v); // half away from zero
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

} // namespace

ColorImage load_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path + ": cannot open for reading");
    }

    const std::string magic = next_token(in);
    int channels = 0;
    bool ascii = false;
    if (magic == "P2") {
        channels = 1;
        ascii = true;
    } else if (magic == "P3") {
        channels = 3;
        ascii = true;
    } else if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw FormatError(path + ": unsupported magic '" + magic + "'");
    }

    const long w = parse_header_int(in, "width", path);
    const long h = parse_header_int(in, "height", path);
    if (w <= 0 || h <= 0) {
        throw FormatError(path + ": invalid dimensions " + std::to_string(w) + "x" +
                          std::to_string(h));
    }
    const long maxval = parse_header_int(in, "maxval", path);
    if (maxval != 255) {
        throw FormatError(path + ": maxval must be 255, got " + std::to_string(maxval));
    }

    ColorImage img;
    img.planes.assign(static_cast<size_t>(channels), Image(h, w));

    if (ascii) {
        for (long i = 0; i < h; ++i) {
            for (long j = 0; j < w; ++j) {
                for (int c = 0; c < channels; ++c) {
                    const long v = parse_header_int(in, "pixel value", path);
                    if (v < 0 || v > 255) {
                        throw FormatError(path + ": pixel value " + std::to_string(v) +
                                          " out of range");
                    }
                    img.planes[c](i, j) = static_cast<double>(v);
                }
            }
        }
    } else {
        // Exactly one whitespace byte separates the header from the payload.
        const int sep = in.get();
        if (sep == EOF) {
            throw FormatError(path + ": truncated payload, missing separator after maxval");
        }
        std::vector<char> payload(static_cast<size_t>(w) * h * channels);
        in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
            throw FormatError(path + ": truncated payload, expected " +
                              std::to_string(payload.size()) + " bytes, got " +
                              std::to_string(in.gcount()));
        }
        size_t pos = 0;
        for (long i = 0; i < h; ++i) {
            for (long j = 0; j < w; ++j) {
                for (int c = 0; c < channels; ++c) {
                    img.planes[c](i, j) =
                        static_cast<double>(static_cast<std::uint8_t>(payload[pos++]));
                }
            }
        }
    }
    return img;
}

Image load_pgm(const std::string& path) {
    ColorImage img = load_pnm(path);
    if (!img.gray()) {
        throw FormatError(path + ": expected a single-plane PGM, got " +
                          std::to_string(img.planes.size()) + " planes");
    }
    return img.planes.front();
}

void save_pnm(const ColorImage& img, const std::string& path) {
    require_valid(img, "save_pnm");
    const int channels = static_cast<int>(img.planes.size());
    const Index h = img.height();
    const Index w = img.width();

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError(path + ": cannot open for writing");
    }
    out << (channels == 1 ? "P5" : "P6") << "\n" << w << " " << h << "\n255\n";

    std::vector<char> payload(static_cast<size_t>(w) * h * channels);
    size_t pos = 0;
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            for (int c = 0; c < channels; ++c) {
                payload[pos++] = static_cast<char>(quantize(img.planes[c](i, j)));
            }
        }
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw IoError(path + ": write failed");
    }
}

void save_pnm(const Image& img, const std::string& path) {
    save_pnm(ColorImage(img), path);
}

} // namespace cnchtv
