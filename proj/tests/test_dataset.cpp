#include "osgmm/dataset.hpp"
#include "osgmm/errors.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace osgmm;
using nlohmann::json;

namespace {

AnnotationSet tiny_set(const std::vector<std::vector<std::string>>& objects_per_image,
                       const std::vector<std::string>& classes) {
    AnnotationSet set;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        set.categories.push_back({static_cast<std::int64_t>(c + 1), classes[c], json::object()});
    }
    std::int64_t next = 1;
    for (std::size_t i = 0; i < objects_per_image.size(); ++i) {
        const auto id = static_cast<std::int64_t>(i + 1);
        set.images.push_back({id, 100, 100, std::to_string(id) + ".jpg", json::object()});
        for (const auto& name : objects_per_image[i]) {
            const auto pos = std::find(classes.begin(), classes.end(), name) - classes.begin();
            set.annotations.push_back({next++, id, Box{0, 0, 10, 10}, pos + 1, json::object()});
        }
    }
    return set;
}

std::vector<std::int64_t> image_ids(const AnnotationSet& set) {
    std::vector<std::int64_t> out;
    for (const auto& img : set.images) {
        out.push_back(img.id);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("class splits", "[dataset]") {
    const ClassSplit voc = split_classes(voc_class_names(), std::size_t{15});
    CHECK(voc.known.size() == 15);
    CHECK(voc.unknown.size() == 5);
    CHECK(voc.known.front() == "aeroplane");
    CHECK(voc.unknown.front() == "pottedplant");

    std::vector<std::string> coco;
    for (int i = 0; i < 80; ++i) {
        coco.push_back("class_" + std::to_string(i));
    }
    const ClassSplit coco_split = split_classes(coco, std::size_t{50});
    CHECK(coco_split.known.size() == 50);
    CHECK(coco_split.unknown.size() == 30);

    const ClassSplit named = split_classes(voc_class_names(), std::vector<std::string>{"dog", "cat"});
    CHECK(named.known == std::vector<std::string>{"cat", "dog"});
    CHECK(named.unknown.size() == 18);

    CHECK_THROWS_AS(split_classes(voc_class_names(), voc_class_names()), ContractViolation);
    CHECK_THROWS_AS(split_classes(voc_class_names(), std::size_t{20}), ContractViolation);
    CHECK_THROWS_AS(split_classes(voc_class_names(), std::size_t{0}), ContractViolation);
    CHECK_THROWS_AS(split_classes(voc_class_names(), std::vector<std::string>{"unicorn"}), ContractViolation);
}

TEST_CASE("filtering removes whole images with unknown objects", "[dataset]") {
    const std::vector<std::string> classes{"cat", "dog", "zebra"};
    const AnnotationSet set = tiny_set({{"cat", "zebra"}, {"dog"}, {"zebra"}, {"cat", "cat"}, {}}, classes);
    const AnnotationSet kept = filter_images(set, {"zebra"});
    CHECK(image_ids(kept) == std::vector<std::int64_t>{2, 4, 5});
    CHECK(kept.annotations.size() == 3);
    REQUIRE(kept.categories.size() == 2);
    CHECK(kept.categories[0].name == "cat");
    CHECK(kept.categories[1].name == "dog");
    CHECK_NOTHROW(kept.validate());
}

TEST_CASE("filtering matches a brute-force scan and is idempotent", "[dataset][property]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const AnnotationSet set = annotation_set_from_json(test::synthetic_coco(50, seed));
        const ClassSplit split = split_classes(set.class_names(), std::size_t{15});
        const AnnotationSet kept = filter_images(set, split.unknown);

        std::set<std::int64_t> unknown_cats;
        for (const auto& c : set.categories) {
            if (std::find(split.unknown.begin(), split.unknown.end(), c.name) != split.unknown.end()) {
                unknown_cats.insert(c.id);
            }
        }
        std::vector<std::int64_t> expected;
        std::map<std::int64_t, std::size_t> expected_counts;
        for (const auto& img : set.images) {
            bool clean = true;
            for (const auto& a : set.annotations) {
                clean = clean && !(a.image_id == img.id && unknown_cats.count(a.category_id));
            }
            if (clean) {
                expected.push_back(img.id);
                for (const auto& a : set.annotations) {
                    if (a.image_id == img.id) {
                        ++expected_counts[a.category_id];
                    }
                }
            }
        }
        CHECK(image_ids(kept) == expected);
        std::map<std::int64_t, std::size_t> counts;
        for (const auto& a : kept.annotations) {
            CHECK(unknown_cats.count(a.category_id) == 0);
            ++counts[a.category_id];
        }
        CHECK(counts == expected_counts);
        CHECK(to_json(filter_images(kept, split.unknown)) == to_json(kept));
    }
}

TEST_CASE("instance ratio audit", "[dataset]") {
    std::vector<std::vector<std::string>> images(100, std::vector<std::string>{"a"});
    for (int i = 0; i < 100; ++i) {
        images.push_back({"b"});
    }
    const std::vector<std::string> classes{"a", "b", "c", "d"};
    const AnnotationSet original = tiny_set(images, classes);
    AnnotationSet filtered = original;
    // Keep 80 of the 100 "a" images and 40 of the 100 "b" images.
    std::erase_if(filtered.images, [](const ImageInfo& img) {
        return (img.id > 80 && img.id <= 100) || img.id > 140;
    });
    std::erase_if(filtered.annotations, [](const Annotation& a) {
        return (a.image_id > 80 && a.image_id <= 100) || a.image_id > 140;
    });
    // Three known classes out of four gives the floor 0.75.
    const RatioReport report = check_instance_ratio(original, filtered, {"a", "b", "c"}, 4);
    CHECK(report.floor == 0.75);
    REQUIRE(report.classes.size() == 3);
    CHECK(report.classes[0].ratio == 0.8);
    CHECK_FALSE(report.classes[0].flagged);
    CHECK(report.classes[1].ratio == 0.4);
    CHECK(report.classes[1].flagged);
    // A known class with no instances at all is flagged so it cannot go unnoticed.
    CHECK(report.classes[2].original == 0);
    CHECK(report.classes[2].flagged);
    CHECK(report.flagged() == std::vector<std::string>{"b", "c"});

    const RatioReport voc = check_instance_ratio(original, filtered, {"a", "b"}, 20);
    CHECK(voc.floor == 0.1);
    CHECK(15.0 / 20.0 == 0.75);
}

TEST_CASE("train/val split is a deterministic partition", "[dataset]") {
    const AnnotationSet set = annotation_set_from_json(test::synthetic_coco(200, 3));
    const TrainValSplit a = split_train_val(set, 0.2, 7);
    const TrainValSplit b = split_train_val(set, 0.2, 7);
    CHECK(to_json(a.train) == to_json(b.train));
    CHECK(to_json(a.val) == to_json(b.val));
    CHECK(a.train.images.size() + a.val.images.size() == set.images.size());
    CHECK(a.train.annotations.size() + a.val.annotations.size() == set.annotations.size());
    CHECK(a.val.images.size() > 20);
    CHECK(a.val.images.size() < 60);
    std::set<std::int64_t> train_ids;
    for (const auto& img : a.train.images) {
        train_ids.insert(img.id);
    }
    for (const auto& img : a.val.images) {
        CHECK(train_ids.count(img.id) == 0);
    }
    const TrainValSplit other = split_train_val(set, 0.2, 8);
    CHECK(to_json(other.val) != to_json(a.val));
    CHECK_THROWS_AS(split_train_val(set, 1.0, 0), ContractViolation);
}

TEST_CASE("COCO files round-trip byte for byte", "[dataset][io]") {
    const auto dir = test::scratch_dir("coco");
    {
        std::ofstream out(dir / "in.json");
        out << test::synthetic_coco(50, 1).dump(1) << '\n';
    }
    const AnnotationSet set = read_coco(dir / "in.json");
    CHECK(set.images.size() == 50);
    CHECK(set.extra.contains("info"));
    write_coco(set, dir / "a.json");
    write_coco(read_coco(dir / "a.json"), dir / "b.json");
    CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));
    CHECK(read_file(dir / "a.json") == read_file(dir / "in.json"));

    json sparse = test::synthetic_coco(3, 1);
    for (auto& ann : sparse["annotations"]) {
        ann.erase("area");
    }
    const json written = to_json(annotation_set_from_json(sparse));
    for (const auto& ann : written["annotations"]) {
        CHECK(ann.contains("area"));
    }
    CHECK(to_json(annotation_set_from_json(written)) == written);
}

TEST_CASE("invalid annotation sets are data errors", "[dataset][io]") {
    json doc = test::synthetic_coco(5, 2);
    doc["annotations"].push_back({{"id", 999}, {"image_id", 77}, {"category_id", 1}, {"bbox", {0, 0, 1, 1}}});
    CHECK_THROWS_AS(annotation_set_from_json(doc), DataError);
    json bad_box = test::synthetic_coco(5, 2);
    bad_box["annotations"].push_back({{"id", 999}, {"image_id", 1}, {"category_id", 1}, {"bbox", {0, 0, 0, 1}}});
    CHECK_THROWS_AS(annotation_set_from_json(bad_box), DataError);
    CHECK_THROWS_AS(annotation_set_from_json(json::parse(R"({"images":3})")), DataError);
    CHECK_THROWS_AS(read_coco("/nonexistent/annotations.json"), DataError);
}

TEST_CASE("VOC XML directories import into annotation sets", "[dataset][io]") {
    const auto dir = test::scratch_dir("voc");
    {
        std::ofstream a(dir / "000002.xml");
        a << "<annotation><filename>000002.jpg</filename><size><width>500</width><height>375</height></size>"
             "<object><name>dog</name><difficult>0</difficult>"
             "<bndbox><xmin>10</xmin><ymin>20</ymin><xmax>110</xmax><ymax>220</ymax></bndbox></object>"
             "<object><name>sofa</name><difficult>1</difficult>"
             "<bndbox><xmin>1</xmin><ymin>2</ymin><xmax>30</xmax><ymax>40</ymax></bndbox></object>"
             "</annotation>";
        std::ofstream b(dir / "000001.xml");
        b << "<annotation><filename>000001.jpg</filename><size><width>300</width><height>200</height></size>"
             "<object><name>cat</name><bndbox><xmin>5</xmin><ymin>5</ymin><xmax>50</xmax><ymax>60</ymax></bndbox>"
             "</object></annotation>";
    }
    const AnnotationSet set = read_voc_directory(dir);
    CHECK(set.categories.size() == 20);
    REQUIRE(set.images.size() == 2);
    CHECK(set.images[0].file_name == "000001.jpg");
    CHECK(set.images[1].width == 500);
    REQUIRE(set.annotations.size() == 3);
    CHECK(set.annotations[1].bbox == Box{10, 20, 110, 220});
    CHECK(set.categories[static_cast<std::size_t>(set.annotations[2].category_id - 1)].name == "sofa");

    const ClassSplit split = split_classes(set.class_names(), std::size_t{15});
    CHECK(split.unknown.size() == 5);
    CHECK(image_ids(filter_images(set, split.unknown)) == std::vector<std::int64_t>{1});

    {
        std::ofstream c(dir / "000003.xml");
        c << "<annotation><object><name>unicorn</name></object></annotation>";
    }
    CHECK_THROWS_AS(read_voc_directory(dir), DataError);
    {
        std::ofstream c(dir / "000003.xml");
        c << "<annotation><object><name>cat</name></object></annotation>";
    }
    CHECK_THROWS_AS(read_voc_directory(dir), DataError);
    CHECK_THROWS_AS(read_voc_directory(dir / "missing"), DataError);
}

TEST_CASE("ground-truth objects carry the known flag", "[dataset]") {
    const std::vector<std::string> classes{"cat", "dog", "zebra"};
    const AnnotationSet set = tiny_set({{"cat", "zebra"}, {"dog"}}, classes);
    const auto objects = ground_truth_objects(set, {"dog", "cat"});
    REQUIRE(objects.size() == 3);
    CHECK(objects[0].image_id == "1");
    CHECK(objects[0].known);
    CHECK(objects[0].class_id == 1);
    CHECK_FALSE(objects[1].known);
    CHECK(objects[1].label == "zebra");
    CHECK(objects[2].class_id == 0);
}
