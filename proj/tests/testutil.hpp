#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "objedit/geometry.hpp"
#include "objedit/image.hpp"

namespace objedit::testutil {

// Unique directory under the system temp root, removed on destruction.
struct TempDir {
    explicit TempDir(const std::string& tag);
    ~TempDir();

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path;
};

geometry::BinaryMask rect_mask(int w, int h, int x0, int y0, int x1, int y1);
geometry::BinaryMask disk_mask(int w, int h, double cx, double cy, double r);

// One annotated object of a synthetic source image. The mask raster gets a
// filled rectangle over exactly [x0,x1) x [y0,y1), matching the annotation.
struct FixtureObject {
    std::string class_name;
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // zero-based, max edges exclusive
    bool truncated = false;
};

// Writes one image worth of VOC-layout files (JPEG, annotation XML, instance
// raster) under root and appends the id to the split list.
void write_voc_image(const std::filesystem::path& root, const std::string& id, int width,
                     int height, const std::vector<FixtureObject>& objects,
                     const std::string& split = "train");

// n images, one cleanly usable rectangle object each; classes cycle through
// the segmentation vocabulary. Object sizes and offsets vary per image but
// every instance passes the usability filters at their defaults.
void write_clean_voc(const std::filesystem::path& root, int n, const std::string& split = "train");

// Six images arranged so each usability rule fires exactly once when
// max_foreground_objects is 2: img_000 survives, img_001 holds two dogs,
// img_002 a truncated person, img_003 a tiny bird, img_004 a bus on the
// frame edge and img_005 three separate classes.
void write_filter_voc(const std::filesystem::path& root, const std::string& split = "train");

}  // namespace objedit::testutil
