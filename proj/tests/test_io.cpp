#include "okdrop/io.hpp"

#include <doctest.h>

using namespace okdrop;

TEST_CASE("droplet config survives a JSON round trip") {
    DropletConfig c;
    c.params.epsilon = 1e-5;
    c.params.ell = 12.0;
    c.droplets.push_back({{1.0, 2.0}, Disk{0.01}});
    c.droplets.push_back({{3.0, 4.0}, Ellipse{0.02, 0.01, 0.3}});
    c.droplets.push_back({{5.0, 6.0}, Polygon{{{0.0, 0.0}, {0.01, 0.0}, {0.0, 0.01}}}});
    const Json j = to_json(c);
    const DropletConfig back = droplet_config_from_json(Json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.params.ell == 12.0);
}

TEST_CASE("point config defaults to a neutral background") {
    const PointConfig p = point_config_from_json(Json::parse(R"({"cell":[[2,0],[0,1]],"points":[[0,0],[1,0.5]]})"));
    CHECK(p.background == doctest::Approx(2.0 * 3.141592653589793 * 2 / 2.0));
    const PointConfig q = point_config_from_json(to_json(p));
    CHECK(q.points.size() == 2);
    CHECK(q.points[1].x == 1.0);
}

TEST_CASE("schema errors carry the JSON pointer of the offending value") {
    auto pointer_of = [](const char *text, auto parse) {
        try {
            parse(Json::parse(text));
        } catch (const SchemaError &e) {
            return e.pointer();
        }
        return std::string("<none>");
    };
    auto droplets = [](const Json &j) { droplet_config_from_json(j); };
    auto points = [](const Json &j) { point_config_from_json(j); };
    CHECK(pointer_of(R"({"droplets":[{"center":[0,0],"shape":{"disk":"x"}}]})", droplets) == "/droplets/0/shape/disk");
    CHECK(pointer_of(R"({"droplets":[{"shape":{"disk":1}}]})", droplets) == "/droplets/0/center");
    CHECK(pointer_of(R"({"params":{"epsilon":1e-6,"temperature":3}})", droplets) == "/params/temperature");
    CHECK(pointer_of(R"({"droplets":[{"center":[0,0],"shape":{"disk":1,"ellipse":{}}}]})", droplets) == "/droplets/0/shape");
    CHECK(pointer_of(R"({"cell":[[1,0],[2,0]],"points":[]})", points) == "/cell");
    CHECK(pointer_of(R"({"cell":[[1,0],[0,1]],"points":[[0,0,0]]})", points) == "/points/0");
}
