#include <filesystem>
#include <fstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "objedit/dataset.hpp"
#include "objedit/error.hpp"

namespace objedit::dataset {

namespace fs = std::filesystem;

const std::vector<std::string> kVocClasses = {
    "aeroplane", "bicycle", "bird",   "boat",        "bottle", "bus",    "car",
    "cat",       "chair",   "cow",    "diningtable", "dog",    "horse",  "motorbike",
    "person",    "pottedplant",       "sheep",       "sofa",   "train",  "tvmonitor"};

namespace {

SourceImage read_one(const fs::path& root, const std::string& id) {
    const fs::path xml_path = root / "Annotations" / (id + ".xml");
    const fs::path jpg_path = root / "JPEGImages" / (id + ".jpg");
    const fs::path seg_path = root / "SegmentationObject" / (id + ".png");

    if (!fs::exists(seg_path))
        throw Error(ErrorCode::MissingMask, "no instance raster " + seg_path.string());
    if (!fs::exists(jpg_path))
        throw Error(ErrorCode::IoError, "no image file " + jpg_path.string());

    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_xml(xml_path.string(), pt);
    } catch (const boost::property_tree::ptree_error& e) {
        throw Error(ErrorCode::MalformedAnnotation, xml_path.string() + ": " + e.what());
    }

    SourceImage img;
    img.id = id;
    img.jpeg_path = jpg_path;
    try {
        img.width = pt.get<int>("annotation.size.width");
        img.height = pt.get<int>("annotation.size.height");
        for (const auto& [key, node] : pt.get_child("annotation")) {
            if (key != "object") continue;
            SourceInstance inst;
            inst.index = int(img.instances.size()) + 1;
            inst.class_name = node.get<std::string>("name");
            inst.truncated = node.get<int>("truncated", 0) != 0;
            // Annotation boxes are 1-based with inclusive max edges; shift to
            // the zero-based max-exclusive convention used everywhere else.
            inst.bbox = {node.get<double>("bndbox.xmin") - 1.0,
                         node.get<double>("bndbox.ymin") - 1.0,
                         node.get<double>("bndbox.xmax"),
                         node.get<double>("bndbox.ymax")};
            img.instances.push_back(std::move(inst));
        }
    } catch (const boost::property_tree::ptree_error& e) {
        throw Error(ErrorCode::MalformedAnnotation, xml_path.string() + ": " + e.what());
    }
    if (img.width <= 0 || img.height <= 0)
        throw Error(ErrorCode::MalformedAnnotation, xml_path.string() + ": bad image size");

    img.instance_raster = image::load_gray(seg_path);
    if (img.instance_raster.width != img.width || img.instance_raster.height != img.height)
        throw Error(ErrorCode::MalformedAnnotation,
                    seg_path.string() + ": raster size differs from the annotation");

    // One pass for per-instance pixel areas and border contact. Index 0 is
    // background, 255 the void border between instances.
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t v = img.instance_raster.values[size_t(y) * img.width + x];
            if (v == 0 || v == 255) continue;
            if (v > img.instances.size())
                throw Error(ErrorCode::MalformedAnnotation,
                            seg_path.string() + ": palette index " + std::to_string(v) +
                                " has no matching annotation object");
            SourceInstance& inst = img.instances[v - 1];
            ++inst.pixel_area;
            if (x == 0 || y == 0 || x == img.width - 1 || y == img.height - 1)
                inst.touches_border = true;
        }
    }
    return img;
}

}  // namespace

std::vector<SourceImage> ingest_voc(const fs::path& root, const std::string& split) {
    const fs::path list_path = root / "ImageSets" / "Segmentation" / (split + ".txt");
    std::ifstream in(list_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open split list " + list_path.string());

    std::vector<SourceImage> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        out.push_back(read_one(root, line));
    }
    return out;
}

geometry::BinaryMask instance_mask(const SourceImage& img, int instance_index) {
    if (instance_index < 1 || size_t(instance_index) > img.instances.size())
        throw Error(ErrorCode::ObjectNotFound,
                    img.id + " has no instance " + std::to_string(instance_index));
    geometry::BinaryMask mask(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            if (img.instance_raster.values[size_t(y) * img.width + x] == instance_index)
                mask.set(x, y, true);
    return mask;
}

}  // namespace objedit::dataset
