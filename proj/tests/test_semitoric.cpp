#include <gtest/gtest.h>

#include "generators.hpp"
#include "semitoric/cusp.hpp"
#include "oracles.hpp"

using namespace semitoric;
using namespace oracle;
using testgen::closed_cone;

namespace {

Vector v(std::initializer_list<long> xs)
{
    Vector out;
    for (long x : xs) {
        out.emplace_back(x);
    }
    return out;
}

Decomposition split(long a, long b) { return testgen::quadrant_fan({{a, b}}); }

} // namespace

TEST(Semitoric, SbbOfQuadrantValidates)
{
    Decomposition sbb = sbb_decomposition(testgen::orthant(2));
    EXPECT_EQ(sbb.members.size(), 4u);
    auto rep = validate_decomposition(sbb, {testgen::orthant(2)});
    EXPECT_TRUE(rep.ok());
    EXPECT_TRUE(is_mumford_type(sbb));
    EXPECT_EQ(sbb_decomposition(testgen::orthant(3)).members.size(), 8u);
    Decomposition no_origin = sbb_decomposition(testgen::orthant(2), false);
    EXPECT_EQ(no_origin.members.size(), 3u);
}

TEST(Semitoric, SbbOfIrrationalCuspConeIsInteriorOnly)
{
    Cone c = cusp_cone(QuadIdeal::ring_of_integers(5));
    Decomposition sbb = sbb_decomposition(c, false);
    ASSERT_EQ(sbb.members.size(), 1u);
    EXPECT_EQ(sbb.members[0].dim(), 2u);
    EXPECT_TRUE(sbb.members[0].is_relint());
    EXPECT_FALSE(in_support(sbb, v({0, 0})));
    auto rep = validate_decomposition(sbb, {closed_cone(2, {{1, 0}, {2, 1}})});
    EXPECT_TRUE(rep.ok());
}

TEST(Semitoric, SbbFaceCountsMatchBruteForce)
{
    std::mt19937_64 rng(101);
    int done = 0;
    while (done < 50) {
        std::size_t r = 1 + rng() % 4;
        std::vector<IntVector> gens;
        for (std::size_t i = 0; i < r; ++i) {
            IntVector g(r);
            for (auto& x : g) {
                x = static_cast<long>(rng() % 7) - 3;
            }
            gens.push_back(g);
        }
        if (determinant(IntMatrix::from_rows(gens, r)) == 0) {
            continue;
        }
        Cone c = closed_cone(r, gens);
        ASSERT_EQ(sbb_decomposition(c).members.size(), brute_force_face_count(gens, r));
        ASSERT_EQ(brute_force_face_count(gens, r), std::size_t{1} << r);
        ++done;
    }
}

TEST(Semitoric, MissingFaceIsWitnessed)
{
    Decomposition sbb = sbb_decomposition(testgen::orthant(2));
    Cone ray = Cone(2, {v({1, 0})}, ConeKind::relative_interior);
    sbb.members.erase(std::remove(sbb.members.begin(), sbb.members.end(), ray), sbb.members.end());
    ASSERT_EQ(sbb.members.size(), 3u);
    auto rep = validate_decomposition(sbb);
    EXPECT_FALSE(rep.face_closure.pass);
    ASSERT_EQ(rep.missing_faces.size(), 1u);
    EXPECT_EQ(rep.missing_faces[0], ray);
    EXPECT_FALSE(rep.disjoint_cover.pass);
}

TEST(Semitoric, OverlapAndIrrationalSpanDetected)
{
    Decomposition d = split(1, 1);
    d.members.push_back(Cone(2, {v({1, 0}), v({1, 2})}, ConeKind::relative_interior));
    auto rep = validate_decomposition(d);
    EXPECT_FALSE(rep.disjoint_cover.pass);
    EXPECT_FALSE(rep.overlaps.empty());

    Scalar s2 = Scalar::sqrt_of(2);
    Decomposition irr;
    irr.rank = 2;
    irr.support = testgen::orthant(2);
    irr.members.push_back(Cone(2, {Vector{Scalar(1), s2}}, ConeKind::relative_interior));
    EXPECT_FALSE(validate_decomposition(irr).rational_spans.pass);
}

TEST(Semitoric, MalformedGroupRejected)
{
    Decomposition d = sbb_decomposition(testgen::orthant(2));
    d.group.push_back({IntMatrix{{2, 0}, {0, 1}}, IntVector{0, 0}});
    EXPECT_THROW(validate_decomposition(d), invalid_input);
}

TEST(Semitoric, RandomMumfordFansValidate)
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 30; ++t) {
        std::size_t r = 2 + t % 2;
        Decomposition fan = testgen::random_mumford_fan(rng, r, 1 + static_cast<int>(rng() % 4));
        ASSERT_TRUE(is_mumford_type(fan));
        auto rep = validate_decomposition(fan, {testgen::orthant(r)});
        ASSERT_TRUE(rep.ok()) << "trial " << t;
        // Disjoint cover: each sampled support point lies in exactly one member.
        for (int s = 0; s < 30; ++s) {
            Vector x = testgen::random_point(rng, testgen::orthant(r));
            long hits = std::count_if(fan.members.begin(), fan.members.end(),
                                      [&](const Cone& c) { return c.contains(x); });
            ASSERT_EQ(hits, 1) << to_string(x);
        }
        for (const auto& s : strata(fan)) {
            ASSERT_EQ(s.complex_dim + s.cone.dim(), r);
            ASSERT_EQ(s.dlp_dim, s.complex_dim);
        }
    }
}

TEST(Semitoric, SingleFaceDeletionsDetected)
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        std::size_t r = 2 + t % 2;
        Decomposition fan = testgen::random_mumford_fan(rng, r, 1 + static_cast<int>(rng() % 3));
        std::vector<std::size_t> proper;
        for (std::size_t i = 0; i < fan.members.size(); ++i) {
            if (fan.members[i].dim() < r) {
                proper.push_back(i);
            }
        }
        std::size_t victim = proper[rng() % proper.size()];
        Cone deleted = fan.members[victim];
        fan.members.erase(fan.members.begin() + static_cast<long>(victim));
        auto rep = validate_decomposition(fan);
        ASSERT_FALSE(rep.face_closure.pass);
        ASSERT_EQ(rep.missing_faces.size(), 1u);
        ASSERT_EQ(rep.missing_faces[0], deleted);
    }
}

TEST(Semitoric, Strata)
{
    Decomposition sbb = sbb_decomposition(testgen::orthant(2));
    for (const auto& s : strata(sbb)) {
        EXPECT_EQ(s.complex_dim, 2 - s.cone.dim());
        EXPECT_EQ(s.dlp_dim, s.complex_dim);
    }
    Chart ch = chart_for(Cone(2, {v({1, 1}), v({0, 1})}, ConeKind::relative_interior));
    EXPECT_EQ(ch.k, 2u);
    EXPECT_EQ(abs(determinant(ch.basis)), 1);
    Chart ray = chart_for(Cone(3, {v({1, 2, 3})}, ConeKind::relative_interior));
    EXPECT_EQ(ray.basis.row(0), (IntVector{1, 2, 3}));
    EXPECT_EQ(abs(determinant(ray.basis)), 1);
    EXPECT_EQ(ray.open_set(), "{w in C^3 : 0<|w1|<1, |w2|=1, |w3|=1}");
    EXPECT_EQ(ray.distinguished_limit_points(), "{w1=0, w2 in S^1, w3 in S^1}");
    EXPECT_THROW(chart_for(Cone(2, {v({1, 0}), v({1, 2})})), invalid_input);
}

TEST(Semitoric, MumfordType)
{
    Decomposition d = sbb_decomposition(closed_cone(2, {{1, 0}, {1, 2}}));
    EXPECT_FALSE(is_mumford_type(d));
}

TEST(Semitoric, RefinementExamples)
{
    Decomposition quad = sbb_decomposition(testgen::orthant(2));
    Decomposition s11 = split(1, 1), s12 = split(1, 2);
    EXPECT_TRUE(is_refinement(quad, quad));
    EXPECT_TRUE(is_refinement(s11, quad));
    EXPECT_FALSE(is_refinement(quad, s11));
    EXPECT_FALSE(is_refinement(s11, s12));
    EXPECT_FALSE(is_refinement(s12, s11));
    Decomposition other = sbb_decomposition(testgen::orthant(2), false);
    EXPECT_THROW(is_refinement(quad, other), invalid_input);
}

TEST(Semitoric, CommonRefinementExamples)
{
    Decomposition quad = sbb_decomposition(testgen::orthant(2));
    Decomposition s11 = split(1, 1), s12 = split(1, 2);
    EXPECT_TRUE(same_members(common_refinement(quad, s11), s11));
    Decomposition both = common_refinement(s11, s12);
    EXPECT_TRUE(same_members(both, testgen::quadrant_fan({{1, 1}, {1, 2}})));
    std::size_t rays = 0, two = 0;
    for (const auto& m : both.members) {
        rays += m.dim() == 1;
        two += m.dim() == 2;
    }
    EXPECT_EQ(rays, 4u);
    EXPECT_EQ(two, 3u);
    EXPECT_TRUE(same_members(common_refinement(s11, s11), s11));
    Decomposition g = s11;
    g.group.push_back({IntMatrix{{0, 1}, {1, 0}}, IntVector{0, 0}});
    EXPECT_THROW(common_refinement(s11, g), invalid_input);
}

TEST(Semitoric, CommonRefinementProperties)
{
    std::mt19937_64 rng(44);
    for (int t = 0; t < 30; ++t) {
        auto a = testgen::random_quadrant_fan(rng);
        auto b = testgen::random_quadrant_fan(rng);
        auto c = testgen::random_quadrant_fan(rng);
        auto ab = common_refinement(a, b);
        ASSERT_TRUE(is_refinement(ab, a));
        ASSERT_TRUE(is_refinement(ab, b));
        ASSERT_TRUE(validate_decomposition(ab).ok());
        ASSERT_TRUE(same_members(ab, common_refinement(b, a)));
        ASSERT_TRUE(same_members(common_refinement(ab, c), common_refinement(a, common_refinement(b, c))));
        ASSERT_TRUE(same_members(common_refinement(a, a), a));
        // Partial order: antisymmetry and transitivity.
        if (is_refinement(a, b) && is_refinement(b, a)) {
            ASSERT_TRUE(same_members(a, b));
        }
        auto abc = common_refinement(ab, c);
        ASSERT_TRUE(is_refinement(abc, ab) && is_refinement(abc, a));
    }
}

TEST(Semitoric, AdmissibilityOnCuspCone)
{
    CuspData data = CuspData::standard(5);
    VertexChain chain = hull_vertices(data, 1);
    Cone support = eigen_support(chain.unit_action, chain.vertex(0));
    Cone pi(2, {to_vector(chain.vertex(0)), to_vector(chain.vertex(1))});
    GroupElement eps{chain.unit_action, IntVector{0, 0}};
    std::vector<GroupElement> cert;
    for (long i = -3; i <= 3; ++i) {
        cert.push_back({power(chain.unit_action, i), IntVector{0, 0}});
    }
    Cone probe(2, {to_vector(chain.vertex(-2)), to_vector(chain.vertex(2))});
    auto ok = admissibility_check(2, support, false, {eps}, pi, cert, probe);
    EXPECT_TRUE(ok.certified);
    auto small = admissibility_check(2, support, false, {eps}, pi, {}, probe);
    EXPECT_FALSE(small.certified);
    ASSERT_TRUE(small.witness.has_value());
    EXPECT_TRUE(probe.contains(*small.witness));
    EXPECT_FALSE(pi.contains(*small.witness));
    Cone outside(2, {v({0, 1})});
    EXPECT_THROW(admissibility_check(2, support, false, {eps}, outside, {}, probe), invalid_input);

    Cone quad = testgen::orthant(2);
    EXPECT_TRUE(admissibility_check(2, quad, true, {}, quad, {}, quad).certified);
}
