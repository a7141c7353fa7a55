#include "bido/simulator.hpp"

namespace bido {

// Hand-placed 68-point mean face in a 200x200 box, Dlib indexing. Eye
// clusters are mirror images about x = 100 with centres at (70,70) and
// (130,70); fractional parts keep every prominent distance and eye offset
// clear of integer / half-integer rounding boundaries.
const Landmarks& mean_face() {
  static const Landmarks face = [] {
    static constexpr double kPoints[kLandmarkCount][2] = {
        {38.2500, 71.6000},  // 0
        {38.7600, 87.8900},  // 1
        {40.5600, 104.0800},  // 2
        {44.7400, 118.8200},  // 3
        {51.1900, 132.9300},  // 4
        {59.3500, 146.1100},  // 5
        {69.3300, 158.0600},  // 6
        {83.3800, 167.3300},  // 7
        {99.7000, 170.2200},  // 8
        {116.8600, 167.2400},  // 9
        {131.1600, 158.2900},  // 10
        {140.6600, 145.8900},  // 11
        {149.2100, 133.4000},  // 12
        {155.2000, 118.5900},  // 13
        {159.0900, 103.6400},  // 14
        {161.0400, 88.2700},  // 15
        {161.6500, 72.3800},  // 16
        {45.1600, 54.7800},  // 17
        {55.3000, 48.0700},  // 18
        {66.6500, 46.2700},  // 19
        {78.8100, 48.1700},  // 20
        {89.3400, 52.0300},  // 21
        {111.1700, 52.2800},  // 22
        {120.8900, 47.6800},  // 23
        {132.7200, 46.0500},  // 24
        {144.6500, 47.5700},  // 25
        {154.7200, 54.9500},  // 26
        {100.4000, 81.5600},  // 27
        {99.8600, 91.6900},  // 28
        {100.0000, 102.3400},  // 29
        {100.2700, 111.5800},  // 30
        {87.7100, 120.2900},  // 31
        {94.1600, 122.9000},  // 32
        {99.9800, 124.6900},  // 33
        {106.3100, 122.9000},  // 34
        {112.3400, 120.1000},  // 35
        {58.3200, 70.1433},  // 36
        {63.8100, 66.2033},  // 37
        {76.1600, 66.0033},  // 38
        {82.0800, 69.8733},  // 39
        {76.0100, 73.9133},  // 40
        {63.6200, 73.8633},  // 41
        {117.9200, 69.8733},  // 42
        {123.8400, 66.0033},  // 43
        {136.1900, 66.2033},  // 44
        {141.6800, 70.1433},  // 45
        {136.3800, 73.8633},  // 46
        {123.9900, 73.9133},  // 47
        {79.6200, 142.8500},  // 48
        {86.7400, 138.3500},  // 49
        {94.0800, 134.5900},  // 50
        {99.7000, 135.8700},  // 51
        {105.9700, 135.0700},  // 52
        {112.9000, 137.8700},  // 53
        {119.5600, 143.0700},  // 54
        {112.8500, 148.5700},  // 55
        {105.9600, 152.4400},  // 56
        {99.5900, 152.6800},  // 57
        {94.1500, 151.8000},  // 58
        {86.8000, 149.0000},  // 59
        {83.7900, 143.0600},  // 60
        {94.0300, 140.4100},  // 61
        {100.4400, 140.5800},  // 62
        {106.0500, 140.2400},  // 63
        {116.3400, 143.2500},  // 64
        {106.1200, 145.1200},  // 65
        {99.8800, 145.8000},  // 66
        {94.2700, 145.3400},  // 67
    };
    Landmarks lm;
    for (int k = 0; k < kLandmarkCount; ++k) {
      lm(k, 0) = kPoints[k][0];
      lm(k, 1) = kPoints[k][1];
    }
    return lm;
  }();
  return face;
}

}  // namespace bido
