// SPDX-License-Identifier: Apache-2.0
#include "dfsq/image.hpp"

#include "dfsq/errors.hpp"

#include <cctype>
#include <fstream>
#include <string>

namespace dfsq {

namespace {

// Next whitespace-separated token, skipping '#' comments to end of line.
std::string next_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

std::uint32_t parse_dim(const std::string& tok, const std::string& path, const char* what) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw IoError(IoError::Kind::MalformedHeader, path + ": bad " + std::string(what));
    const unsigned long v = std::stoul(tok);
    if (v == 0 || v > 1u << 20)
        throw IoError(IoError::Kind::MalformedHeader, path + ": bad " + std::string(what));
    return static_cast<std::uint32_t>(v);
}

} // namespace

Image read_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open " + path.string());

    const std::string magic = next_token(is);
    int channels;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        throw IoError(IoError::Kind::BadMagic,
                      path.string() + ": expected P5 or P6, got \"" + magic + "\"");
    }

    const std::uint32_t width = parse_dim(next_token(is), path.string(), "width");
    const std::uint32_t height = parse_dim(next_token(is), path.string(), "height");
    const std::string maxval = next_token(is);
    if (maxval.empty() || maxval.find_first_not_of("0123456789") != std::string::npos)
        throw IoError(IoError::Kind::MalformedHeader, path.string() + ": bad maxval");
    if (maxval != "255")
        throw IoError(IoError::Kind::UnsupportedMaxval,
                      path.string() + ": unsupported maxval " + maxval + " (only 255)");
    // Exactly one whitespace byte separates the header from the payload; the
    // token reader has already consumed it.

    Image img = Image::make(width, height, channels);
    if (!is.read(reinterpret_cast<char*>(img.pixels.data()),
                 static_cast<std::streamsize>(img.pixels.size())))
        throw IoError(IoError::Kind::Truncated, path.string() + ": truncated pixel data");
    return img;
}

void write_image(const Image& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3)
        throw ValidationError("write_image: channels must be 1 or 3");
    if (img.pixels.size() != img.pixel_count() * static_cast<std::size_t>(img.channels))
        throw ValidationError("write_image: pixel buffer does not match dimensions");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot create " + path.string());
    os << (img.channels == 1 ? "P5" : "P6") << '\n'
       << img.width << ' ' << img.height << '\n'
       << "255" << '\n';
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw IoError(IoError::Kind::WriteFailed, "write failed: " + path.string());
}

Image crop_border(const Image& img, std::uint32_t border) {
    if (2 * border >= img.width || 2 * border >= img.height)
        throw ValidationError("crop_border: border " + std::to_string(border) +
                              " leaves no pixels in a " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + " image");
    Image out = Image::make(img.width - 2 * border, img.height - 2 * border, img.channels);
    for (std::uint32_t y = 0; y < out.height; ++y)
        for (std::uint32_t x = 0; x < out.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(x + border, y + border, c);
    return out;
}

} // namespace dfsq
