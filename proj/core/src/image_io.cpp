#include "objedit/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <jpeglib.h>
#include <png.h>

namespace objedit::image {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

// --- PNM -------------------------------------------------------------------

// Header: magic, whitespace/comments, width, height, maxval, single
// whitespace byte, then raw samples.
struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
    size_t data_offset = 0;
};

PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes) {
    size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> int {
        skip_space();
        size_t start = pos;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) ++pos;
        if (pos == start) throw Error(ErrorCode::IoError, "malformed PNM header");
        return std::stoi(std::string(bytes.begin() + long(start), bytes.begin() + long(pos)));
    };

    PnmHeader h;
    if (bytes.size() < 2) throw Error(ErrorCode::IoError, "truncated PNM");
    h.magic = {char(bytes[0]), char(bytes[1])};
    pos = 2;
    h.width = read_int();
    h.height = read_int();
    h.maxval = read_int();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error(ErrorCode::IoError, "malformed PNM header");
    ++pos;
    h.data_offset = pos;
    if (h.width <= 0 || h.height <= 0 || h.maxval != 255) {
        throw Error(ErrorCode::IoError, "unsupported PNM geometry or maxval");
    }
    return h;
}

std::vector<std::uint8_t> pnm_bytes(const std::string& magic, int w, int h, const std::vector<std::uint8_t>& samples) {
    std::ostringstream head;
    head << magic << "\n" << w << " " << h << "\n255\n";
    const std::string hs = head.str();
    std::vector<std::uint8_t> out(hs.begin(), hs.end());
    out.insert(out.end(), samples.begin(), samples.end());
    return out;
}

// --- PNG -------------------------------------------------------------------

struct PngReadCtx {
    const std::uint8_t* data;
    size_t size;
    size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t n) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + n > ctx->size) png_error(png, "read past end");
    std::memcpy(out, ctx->data + ctx->pos, n);
    ctx->pos += n;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + n);
}

void png_mem_flush(png_structp) {}

// Decodes to either RGB (expand_palette = true path for color images) or to
// raw single-channel values. Palette images decoded as gray keep their raw
// palette indices, which is how VOC instance rasters encode object ids.
void decode_png(const std::vector<std::uint8_t>& bytes, bool want_rgb, Image* rgb_out, GrayImage* gray_out) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "png alloc failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::IoError, "png alloc failed");
    }
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::IoError, "png decode failed");
    }
    PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, png_mem_read);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);

    if (want_rgb) {
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
        if (depth < 8) png_set_expand(png);
    } else {
        // raw indices / gray values
        if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA) {
            png_set_rgb_to_gray_fixed(png, 1, -1, -1);
        }
        if (depth < 8) png_set_packing(png);
    }
    png_read_update_info(png, info);

    const size_t rowbytes = png_get_rowbytes(png, info);
    const size_t channels = want_rgb ? 3 : 1;
    if (rowbytes != channels * w) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::IoError, "unexpected png row size");
    }

    std::vector<std::uint8_t> pixels(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (want_rgb) {
        rgb_out->width = int(w);
        rgb_out->height = int(h);
        rgb_out->rgb = std::move(pixels);
    } else {
        gray_out->width = int(w);
        gray_out->height = int(h);
        gray_out->values = std::move(pixels);
    }
}

std::vector<std::uint8_t> encode_png(int w, int h, int color_type, const std::vector<std::uint8_t>& pixels) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorCode::IoError, "png alloc failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCode::IoError, "png alloc failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::IoError, "png encode failed");
    }
    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const size_t channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) {
        rows[y] = const_cast<png_bytep>(pixels.data() + size_t(y) * w * channels);
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

// --- JPEG ------------------------------------------------------------------

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    longjmp(mgr->jump, 1);
}

Image decode_jpeg(const std::vector<std::uint8_t>& bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw Error(ErrorCode::IoError, "jpeg decode failed");
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    Image img(int(cinfo.output_width), int(cinfo.output_height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.rgb.data() + size_t(cinfo.output_scanline) * img.width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality) {
    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        free(buf);
        throw Error(ErrorCode::IoError, "jpeg encode failed");
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buf, &buf_size);
    cinfo.image_width = JDIMENSION(img.width);
    cinfo.image_height = JDIMENSION(img.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(img.rgb.data() + size_t(cinfo.next_scanline) * img.width * 3);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
    std::vector<std::uint8_t> out(buf, buf + buf_size);
    free(buf);
    return out;
}

enum class Format { Pnm, Png, Jpeg };

Format format_of(const std::filesystem::path& path, const std::vector<std::uint8_t>* bytes) {
    if (bytes && bytes->size() >= 2) {
        const auto& b = *bytes;
        if (b[0] == 'P' && (b[1] == '5' || b[1] == '6')) return Format::Pnm;
        if (b.size() >= 8 && b[0] == 0x89 && b[1] == 'P' && b[2] == 'N' && b[3] == 'G') return Format::Png;
        if (b[0] == 0xFF && b[1] == 0xD8) return Format::Jpeg;
        throw Error(ErrorCode::IoError, "unrecognized image format: " + path.string());
    }
    std::string ext = path.extension().string();
    for (auto& c : ext) c = char(std::tolower(c));
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return Format::Pnm;
    if (ext == ".png") return Format::Png;
    if (ext == ".jpg" || ext == ".jpeg") return Format::Jpeg;
    throw Error(ErrorCode::IoError, "unsupported image extension: " + path.string());
}

}  // namespace

Image decode_ppm(const std::vector<std::uint8_t>& bytes) {
    const PnmHeader h = parse_pnm_header(bytes);
    if (h.magic != "P6") throw Error(ErrorCode::IoError, "expected P6");
    const size_t need = size_t(3) * h.width * h.height;
    if (bytes.size() - h.data_offset < need) throw Error(ErrorCode::IoError, "truncated P6 payload");
    Image img(h.width, h.height);
    std::memcpy(img.rgb.data(), bytes.data() + h.data_offset, need);
    return img;
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    const PnmHeader h = parse_pnm_header(bytes);
    if (h.magic != "P5") throw Error(ErrorCode::IoError, "expected P5");
    const size_t need = size_t(h.width) * h.height;
    if (bytes.size() - h.data_offset < need) throw Error(ErrorCode::IoError, "truncated P5 payload");
    GrayImage img(h.width, h.height);
    std::memcpy(img.values.data(), bytes.data() + h.data_offset, need);
    return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& img) { return pnm_bytes("P6", img.width, img.height, img.rgb); }

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    return pnm_bytes("P5", img.width, img.height, img.values);
}

Image load_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    switch (format_of(path, &bytes)) {
        case Format::Pnm: return decode_ppm(bytes);
        case Format::Jpeg: return decode_jpeg(bytes);
        case Format::Png: {
            Image img;
            decode_png(bytes, true, &img, nullptr);
            return img;
        }
    }
    throw Error(ErrorCode::IoError, "unreachable");
}

void save_image(const Image& img, const std::filesystem::path& path) {
    switch (format_of(path, nullptr)) {
        case Format::Pnm: write_file(path, encode_ppm(img)); return;
        case Format::Jpeg: write_file(path, encode_jpeg(img, 92)); return;
        case Format::Png: write_file(path, encode_png(img.width, img.height, PNG_COLOR_TYPE_RGB, img.rgb)); return;
    }
}

GrayImage load_gray(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    switch (format_of(path, &bytes)) {
        case Format::Pnm: return decode_pgm(bytes);
        case Format::Png: {
            GrayImage img;
            decode_png(bytes, false, nullptr, &img);
            return img;
        }
        case Format::Jpeg: {
            const Image img = decode_jpeg(bytes);
            GrayImage g(img.width, img.height);
            for (size_t i = 0; i < g.values.size(); ++i) {
                const std::uint8_t* p = img.rgb.data() + i * 3;
                g.values[i] = std::uint8_t((p[0] * 299 + p[1] * 587 + p[2] * 114) / 1000);
            }
            return g;
        }
    }
    throw Error(ErrorCode::IoError, "unreachable");
}

void save_gray(const GrayImage& img, const std::filesystem::path& path) {
    switch (format_of(path, nullptr)) {
        case Format::Pnm: write_file(path, encode_pgm(img)); return;
        case Format::Png:
            write_file(path, encode_png(img.width, img.height, PNG_COLOR_TYPE_GRAY, img.values));
            return;
        case Format::Jpeg: throw Error(ErrorCode::IoError, "refusing lossy format for single-channel raster");
    }
}

geometry::BinaryMask mask_from_pgm(const std::vector<std::uint8_t>& bytes) {
    const GrayImage g = decode_pgm(bytes);
    std::vector<std::uint8_t> bits(g.values.size());
    for (size_t i = 0; i < bits.size(); ++i) {
        if (g.values[i] == 0) {
            bits[i] = 0;
        } else if (g.values[i] == 255) {
            bits[i] = 1;
        } else {
            throw Error(ErrorCode::BadMaskValue, "mask sample " + std::to_string(g.values[i]) + " (want 0 or 255)");
        }
    }
    return geometry::BinaryMask(g.width, g.height, std::move(bits));
}

std::vector<std::uint8_t> mask_to_pgm(const geometry::BinaryMask& mask) {
    GrayImage g(mask.width(), mask.height());
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = mask.bits()[i] ? 255 : 0;
    return encode_pgm(g);
}

geometry::BinaryMask load_mask(const std::filesystem::path& path) {
    const GrayImage g = load_gray(path);
    std::vector<std::uint8_t> bits(g.values.size());
    for (size_t i = 0; i < bits.size(); ++i) {
        if (g.values[i] == 0) {
            bits[i] = 0;
        } else if (g.values[i] == 255) {
            bits[i] = 1;
        } else {
            throw Error(ErrorCode::BadMaskValue,
                        path.string() + ": sample " + std::to_string(g.values[i]) + " (want 0 or 255)");
        }
    }
    return geometry::BinaryMask(g.width, g.height, std::move(bits));
}

void save_mask(const geometry::BinaryMask& mask, const std::filesystem::path& path) {
    GrayImage g(mask.width(), mask.height());
    for (size_t i = 0; i < g.values.size(); ++i) g.values[i] = mask.bits()[i] ? 255 : 0;
    save_gray(g, path);
}

}  // namespace objedit::image
