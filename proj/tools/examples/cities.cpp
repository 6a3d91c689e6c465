// Reconstructs a map of cities from a subset of their planar (longitude, latitude)
// distances. Usage: edg_cities [cities.csv] [rho]
// Without a file a small built-in list of European capitals is used.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "edg/edg.hpp"

namespace {

const char* kCapitals = R"(name,lat,lon
Amsterdam,52.37,4.90
Athens,37.98,23.73
Berlin,52.52,13.40
Bern,46.95,7.45
Bratislava,48.15,17.11
Brussels,50.85,4.35
Bucharest,44.43,26.10
Budapest,47.50,19.04
Copenhagen,55.68,12.57
Dublin,53.35,-6.26
Helsinki,60.17,24.94
Lisbon,38.72,-9.14
Ljubljana,46.06,14.51
London,51.51,-0.13
Luxembourg,49.61,6.13
Madrid,40.42,-3.70
Oslo,59.91,10.75
Paris,48.86,2.35
Prague,50.08,14.44
Riga,56.95,24.11
Rome,41.90,12.50
Sofia,42.70,23.32
Stockholm,59.33,18.07
Tallinn,59.44,24.75
Vienna,48.21,16.37
Vilnius,54.69,25.28
Warsaw,52.23,21.01
Zagreb,45.81,15.98
)";

} // namespace

int main(int argc, char** argv) {
    try {
        const std::string text = argc > 1 ? edg::read_text_file(argv[1]) : std::string(kCapitals);
        const double rho = argc > 2 ? std::atof(argv[2]) : 2.0;
        const edg::PointCloud map = edg::center(edg::load_latlong_csv(text));
        const edg::Index n = map.n();

        const edg::Index m = edg::oversampling_to_m(rho, n, 2);
        const edg::SampleSet samples = edg::observe(map, edg::sample_pairs(n, m, 1));

        edg::IrlsConfig cfg;
        cfg.r_tilde = 2;
        const edg::IrlsResult res = edg::matrix_irls(samples, cfg);
        const edg::PointCloud rec = edg::recovered_points(res, 2, true);

        std::printf("%lld cities, %lld of %lld distances observed\n", static_cast<long long>(n),
                    static_cast<long long>(m), static_cast<long long>(samples.L()));
        std::printf("%s after %d iterations\n", res.stop_reason.c_str(), res.iterations());
        std::printf("relative Procrustes error %.3e\n", edg::procrustes_distance(rec, map));
        std::fputs(edg::write_point_cloud_csv(rec).c_str(), stdout);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "edg_cities: %s\n", e.what());
        return 1;
    }
}
