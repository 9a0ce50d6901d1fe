#include <gtest/gtest.h>

#include <cmath>

#include "dronemap/image.hpp"
#include "dronemap/random.hpp"
#include "oracles.hpp"

using namespace dronemap;

namespace {

RgbImage numbered_rgb(int w, int h) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img(x, y) = Rgb{static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), static_cast<std::uint8_t>(x * 7 + y)};
    }
  }
  return img;
}

}  // namespace

// ---- to_grayscale ----------------------------------------------------------

TEST(Grayscale, BlackFrameIsAllZero) {
  const GrayImage g = to_grayscale(RgbImage(5, 4, Rgb{0, 0, 0}));
  ASSERT_EQ(g.width(), 5);
  ASSERT_EQ(g.height(), 4);
  for (double v : g.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(Grayscale, WhiteFrameIsAll255) {
  const GrayImage g = to_grayscale(RgbImage(5, 4, Rgb{255, 255, 255}));
  for (double v : g.pixels()) EXPECT_NEAR(v, 255.0, 1e-9);
}

TEST(Grayscale, RandomFrameMatchesScalarLuma) {
  SplitMix64 rng(11);
  const RgbImage img = oracle::random_rgb_image(8, 8, rng);
  const GrayImage g = to_grayscale(img);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const Rgb p = img(x, y);
      const double expected = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
      EXPECT_NEAR(g(x, y), expected, 1e-12);
    }
  }
}

TEST(Grayscale, OutputBoundedTo0_255) {
  SplitMix64 rng(12);
  const GrayImage g = to_grayscale(oracle::random_rgb_image(40, 30, rng));
  for (double v : g.pixels()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0 + 1e-9);
  }
}

TEST(Grayscale, RegionEqualsGrayscaleOfCrop) {
  SplitMix64 rng(13);
  const RgbImage img = oracle::random_rgb_image(20, 15, rng);
  const Rect r{3, 4, 9, 6};
  EXPECT_EQ(to_grayscale(img, r), to_grayscale(crop(img, r)));
}

// ---- integral image --------------------------------------------------------

TEST(IntegralImage, ZeroImageGivesZeroTable) {
  const IntegralImage ii(GrayImage(3, 3, 0.0));
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) EXPECT_EQ(ii.sum(x, y), 0.0);
  }
}

TEST(IntegralImage, OnesGiveProductOfIndices) {
  const IntegralImage ii(GrayImage(7, 5, 1.0));
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) EXPECT_EQ(ii.sum(x, y), (x + 1.0) * (y + 1.0));
  }
}

TEST(IntegralImage, RandomMatchesNestedLoopSummation) {
  SplitMix64 rng(21);
  const GrayImage img = oracle::random_integer_image(8, 8, rng);
  const IntegralImage ii = integral_image(img);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) EXPECT_EQ(ii.sum(x, y), oracle::naive_box_sum(img, 0, 0, x + 1, y + 1));
  }
}

TEST(IntegralImage, LastEntryIsTotalAndTableIsMonotone) {
  SplitMix64 rng(22);
  const GrayImage img = oracle::random_integer_image(17, 9, rng);
  const IntegralImage ii(img);
  EXPECT_EQ(ii.sum(16, 8), oracle::naive_box_sum(img, 0, 0, 17, 9));
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 17; ++x) {
      if (x > 0) {
        EXPECT_GE(ii.sum(x, y), ii.sum(x - 1, y));
      }
      if (y > 0) {
        EXPECT_GE(ii.sum(x, y), ii.sum(x, y - 1));
      }
    }
  }
}

TEST(IntegralImage, IsLinear) {
  SplitMix64 rng(23);
  const GrayImage f = oracle::random_integer_image(12, 10, rng);
  const GrayImage g = oracle::random_integer_image(12, 10, rng);
  const double a = 3.0;
  GrayImage combo(12, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) combo(x, y) = a * f(x, y) + g(x, y);
  }
  const IntegralImage iif(f), iig(g), iic(combo);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 12; ++x) EXPECT_EQ(iic.sum(x, y), a * iif.sum(x, y) + iig.sum(x, y));
  }
}

// ---- box_sum ---------------------------------------------------------------

TEST(BoxSum, FullRectOnOnes4x4Is16) {
  const IntegralImage ii(GrayImage(4, 4, 1.0));
  EXPECT_EQ(ii.box_sum(Rect{0, 0, 4, 4}), 16.0);
}

TEST(BoxSum, ZeroAreaRectIsZero) {
  const IntegralImage ii(GrayImage(4, 4, 1.0));
  EXPECT_EQ(ii.box_sum(Rect{1, 1, 0, 3}), 0.0);
  EXPECT_EQ(ii.box_sum(Rect{1, 1, 3, 0}), 0.0);
}

TEST(BoxSum, RandomRectsMatchNaiveSumExactly) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(40));
    const int h = 1 + static_cast<int>(rng.below(40));
    const GrayImage img = oracle::random_integer_image(w, h, rng);
    const IntegralImage ii(img);
    const int rx = static_cast<int>(rng.below(w));
    const int ry = static_cast<int>(rng.below(h));
    const int rw = static_cast<int>(rng.below(w - rx + 1));
    const int rh = static_cast<int>(rng.below(h - ry + 1));
    ASSERT_EQ(ii.box_sum(rx, ry, rw, rh), oracle::naive_box_sum(img, rx, ry, rw, rh)) << "trial " << trial;
  }
}

TEST(BoxSum, RealValuedSourceWithinRelativeTolerance) {
  SplitMix64 rng(32);
  GrayImage img(30, 20);
  for (double& v : img.pixels()) v = rng.uniform(0.0, 255.0);
  const IntegralImage ii(img);
  for (int trial = 0; trial < 100; ++trial) {
    const int rx = static_cast<int>(rng.below(30)), ry = static_cast<int>(rng.below(20));
    const int rw = 1 + static_cast<int>(rng.below(30 - rx)), rh = 1 + static_cast<int>(rng.below(20 - ry));
    const double expected = oracle::naive_box_sum(img, rx, ry, rw, rh);
    EXPECT_NEAR(ii.box_sum(rx, ry, rw, rh), expected, 1e-6 * std::abs(expected));
  }
}

TEST(BoxSum, ClampsRectsToTheImage) {
  SplitMix64 rng(33);
  const GrayImage img = oracle::random_integer_image(10, 8, rng);
  const IntegralImage ii(img);
  EXPECT_EQ(ii.box_sum(-5, -5, 8, 7), oracle::naive_box_sum(img, 0, 0, 3, 2));
  EXPECT_EQ(ii.box_sum(7, 6, 10, 10), oracle::naive_box_sum(img, 7, 6, 3, 2));
  EXPECT_EQ(ii.box_sum(-100, 0, 50, 8), 0.0);
}

// ---- crop ------------------------------------------------------------------

TEST(Crop, FullRectIsIdentity) {
  const RgbImage img = numbered_rgb(9, 6);
  EXPECT_EQ(crop(img, img.bounds()), img);
}

TEST(Crop, SinglePixel) {
  const RgbImage img = numbered_rgb(9, 6);
  const RgbImage one = crop(img, Rect{4, 3, 1, 1});
  ASSERT_EQ(one.width(), 1);
  ASSERT_EQ(one.height(), 1);
  EXPECT_EQ(one(0, 0), img(4, 3));
}

TEST(Crop, CompositionEqualsSingleCrop) {
  SplitMix64 rng(41);
  const RgbImage img = oracle::random_rgb_image(30, 25, rng);
  for (int trial = 0; trial < 50; ++trial) {
    const int x1 = static_cast<int>(rng.below(20)), y1 = static_cast<int>(rng.below(15));
    const int w1 = 1 + static_cast<int>(rng.below(30 - x1)), h1 = 1 + static_cast<int>(rng.below(25 - y1));
    const int x2 = static_cast<int>(rng.below(w1)), y2 = static_cast<int>(rng.below(h1));
    const int w2 = 1 + static_cast<int>(rng.below(w1 - x2)), h2 = 1 + static_cast<int>(rng.below(h1 - y2));
    EXPECT_EQ(crop(crop(img, Rect{x1, y1, w1, h1}), Rect{x2, y2, w2, h2}), crop(img, Rect{x1 + x2, y1 + y2, w2, h2}));
  }
}

TEST(Crop, OutsideRectThrowsOutOfBounds) {
  const RgbImage img = numbered_rgb(9, 6);
  for (const Rect r : {Rect{-1, 0, 2, 2}, Rect{8, 0, 2, 2}, Rect{0, 5, 2, 2}, Rect{0, 0, 10, 6}}) {
    try {
      crop(img, r);
      FAIL() << "expected OutOfBounds";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::OutOfBounds);
    }
  }
}

// ---- rotate_quarter --------------------------------------------------------

TEST(Rotate, ZeroTurnsIsIdentity) {
  const RgbImage img = numbered_rgb(5, 3);
  EXPECT_EQ(rotate_quarter(img, 0), img);
}

TEST(Rotate, FourQuarterTurnsAreIdentity) {
  SplitMix64 rng(51);
  const RgbImage img = oracle::random_rgb_image(7, 4, rng);
  RgbImage r = img;
  for (int k = 0; k < 4; ++k) r = rotate_quarter(r, 1);
  EXPECT_EQ(r, img);
}

TEST(Rotate, OneTurnMatchesIndexRemap) {
  // 2 wide, 3 tall, distinct values.
  GrayImage img(2, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 2; ++x) img(x, y) = 10 * y + x;
  }
  const GrayImage r = rotate_quarter(img, 1);
  ASSERT_EQ(r.width(), 3);
  ASSERT_EQ(r.height(), 2);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 2; ++x) EXPECT_EQ(r(3 - 1 - y, x), img(x, y));
  }
}

TEST(Rotate, MultiTurnEqualsRepeatedSingleTurns) {
  SplitMix64 rng(52);
  const RgbImage img = oracle::random_rgb_image(6, 9, rng);
  EXPECT_EQ(rotate_quarter(img, 2), rotate_quarter(rotate_quarter(img, 1), 1));
  EXPECT_EQ(rotate_quarter(img, 3), rotate_quarter(rotate_quarter(rotate_quarter(img, 1), 1), 1));
  EXPECT_EQ(rotate_quarter(img, -1), rotate_quarter(img, 3));
}

TEST(Rotate, RectMapsLikeItsPixels) {
  SplitMix64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 2 + static_cast<int>(rng.below(10)), h = 2 + static_cast<int>(rng.below(10));
    const int rx = static_cast<int>(rng.below(w)), ry = static_cast<int>(rng.below(h));
    const Rect r{rx, ry, 1 + static_cast<int>(rng.below(w - rx)), 1 + static_cast<int>(rng.below(h - ry))};
    const int turns = static_cast<int>(rng.below(4));
    const Rect rr = rotate_rect(r, w, h, turns);
    EXPECT_EQ(rr.area(), r.area());
    for (int y = r.y; y < r.y + r.h; ++y) {
      for (int x = r.x; x < r.x + r.w; ++x) {
        int px = x, py = y;
        rotate_point(w, h, turns, px, py);
        EXPECT_TRUE(rr.contains(px, py));
      }
    }
  }
}

// ---- concat ----------------------------------------------------------------

TEST(Concat, VerticalHeightsAdd) {
  const RgbImage out = concat(RgbImage(6, 10), RgbImage(6, 12), StitchDirection::BottomToTop);
  EXPECT_EQ(out.width(), 6);
  EXPECT_EQ(out.height(), 22);
}

TEST(Concat, ZeroExtentSecondImageIsNeutral) {
  const RgbImage a = numbered_rgb(6, 4);
  EXPECT_EQ(concat(a, RgbImage(6, 0), StitchDirection::BottomToTop), a);
  EXPECT_EQ(concat(a, RgbImage(0, 0), StitchDirection::LeftToRight), a);
  EXPECT_EQ(concat(RgbImage(), a, StitchDirection::TopToBottom), a);
}

TEST(Concat, CropOfEachHalfRecoversInputs) {
  SplitMix64 rng(61);
  const RgbImage a = oracle::random_rgb_image(8, 5, rng);
  const RgbImage b = oracle::random_rgb_image(8, 7, rng);
  const RgbImage v = concat(a, b, StitchDirection::TopToBottom);
  EXPECT_EQ(crop(v, Rect{0, 0, 8, 5}), a);
  EXPECT_EQ(crop(v, Rect{0, 5, 8, 7}), b);

  const RgbImage c = oracle::random_rgb_image(3, 5, rng);
  const RgbImage h = concat(a, c, StitchDirection::LeftToRight);
  ASSERT_EQ(h.width(), 11);
  EXPECT_EQ(crop(h, Rect{0, 0, 8, 5}), a);
  EXPECT_EQ(crop(h, Rect{8, 0, 3, 5}), c);
}

TEST(Concat, MismatchedExtentThrows) {
  try {
    concat(RgbImage(6, 4), RgbImage(7, 4), StitchDirection::BottomToTop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
  try {
    concat(RgbImage(6, 4), RgbImage(6, 5), StitchDirection::RightToLeft);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DimensionMismatch);
  }
}

// ---- misc ------------------------------------------------------------------

TEST(Rect, IntersectIsSymmetricAndContained) {
  const Rect a{0, 0, 10, 10}, b{5, -3, 10, 6};
  const Rect i = intersect(a, b);
  EXPECT_EQ(i, (Rect{5, 0, 5, 3}));
  EXPECT_EQ(intersect(b, a), i);
  EXPECT_TRUE(intersect(a, Rect{20, 20, 3, 3}).empty());
}

TEST(Direction, NamesRoundTrip) {
  for (auto d : {StitchDirection::BottomToTop, StitchDirection::TopToBottom, StitchDirection::LeftToRight,
                 StitchDirection::RightToLeft}) {
    EXPECT_EQ(parse_direction(direction_name(d)), d);
  }
  EXPECT_THROW(parse_direction("Sideways"), Error);
}
