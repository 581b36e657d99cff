#include <gtest/gtest.h>

#include <sstream>

#include "conspigraph/metrics.hpp"

namespace cg = conspigraph;
namespace mt = cg::metrics;
using cg::monetization::Category;

namespace {

cg::monetization::Hit hit(Category c, std::string platform, std::string id) {
  cg::monetization::Hit h;
  h.category = c;
  h.platform = std::move(platform);
  h.extracted_id = std::move(id);
  h.url = "https://example.com/" + h.extracted_id;
  return h;
}

mt::RateTable rates(const std::string& text) {
  std::istringstream in(text);
  return mt::RateTable::parse(in, "rates");
}

}  // namespace

TEST(Cents, ParseAndFormat) {
  EXPECT_EQ(mt::parse_cents("1,234.56"), 123456);
  EXPECT_EQ(mt::parse_cents("7.5"), 750);
  EXPECT_EQ(mt::parse_cents("42"), 4200);
  EXPECT_FALSE(mt::parse_cents("1.234"));
  EXPECT_FALSE(mt::parse_cents("abc"));
  EXPECT_EQ(mt::format_cents(123456), "1234.56");
  EXPECT_EQ(mt::format_cents(5), "0.05");
}

TEST(Parse, PatreonMonthlyHtml) {
  auto r = mt::parse_page(hit(Category::donation, "Patreon", "x"),
                          "<div>$2,000 <span>per month</span></div><p>150 patrons</p>", false, "t");
  EXPECT_EQ(r.status, mt::Status::ongoing);
  EXPECT_EQ(r.funds_cents, 200000);
  EXPECT_EQ(r.currency, "USD");
  EXPECT_EQ(r.supporters, 150);
  EXPECT_EQ(r.period, mt::Period::monthly);
}

TEST(Parse, RemovedPageUnreachable) {
  auto r = mt::parse_page(hit(Category::crowdfunding, "GoFundMe", "x"), "<h1>This campaign has been removed</h1>", false, "t");
  EXPECT_EQ(r.status, mt::Status::unreachable);
  EXPECT_FALSE(r.countable());
}

TEST(Parse, MissingFiguresThrow) {
  EXPECT_THROW(mt::parse_page(hit(Category::crowdfunding, "GoFundMe", "x"), "<p>hello</p>", false, "t"), cg::ParseError);
  EXPECT_THROW(mt::parse_page(hit(Category::crowdfunding, "GoFundMe", "x"), "{\"supporters\": 3}", true, "t"),
               cg::ParseError);
}

TEST(Parse, KickstarterAlwaysAllOrNothing) {
  auto r = mt::parse_page(hit(Category::crowdfunding, "Kickstarter", "u/p"),
                          R"({"funds": 100, "goal": 1000, "supporters": 4, "model": "keep_it_all", "status": "failed"})",
                          true, "t");
  EXPECT_EQ(r.model, mt::Model::all_or_nothing);
  EXPECT_EQ(r.status, mt::Status::failed);
  EXPECT_FALSE(r.countable());
}

TEST(Parse, IndiegogoFixedGoal) {
  auto r = mt::parse_page(hit(Category::crowdfunding, "Indiegogo", "p"),
                          "<p>$500 raised of $1,000 goal</p><p>12 backers</p><p>Fixed goal</p><p>campaign ended</p>", false,
                          "t");
  EXPECT_EQ(r.model, mt::Model::all_or_nothing);
  EXPECT_EQ(r.status, mt::Status::failed);
}

TEST(Parse, EndedCampaignPastGoalSucceeds) {
  auto r = mt::parse_page(hit(Category::crowdfunding, "GoFundMe", "p"),
                          "<p>$1,500 raised of $1,000</p><p>20 donations</p><p>Campaign ended</p>", false, "t");
  EXPECT_EQ(r.status, mt::Status::succeeded);
  auto e = mt::parse_page(hit(Category::crowdfunding, "GoFundMe", "p"),
                          "<p>$1,500 raised of $1,000</p><p>20 donations</p><p>this campaign has ended</p>", false, "t");
  EXPECT_EQ(e.status, mt::Status::succeeded);
}

TEST(Parse, DonorboxWithGoalBecomesCrowdfunding) {
  auto r = mt::parse_page(hit(Category::donation, "DonorBox", "c"),
                          "<p>$3,000 raised</p><p>of $10,000</p><p>45 donations</p>", false, "t");
  EXPECT_EQ(r.category, Category::crowdfunding);
  EXPECT_EQ(r.funds_cents, 300000);
  auto plain = mt::parse_page(hit(Category::donation, "DonorBox", "d"), "<p>Donate now</p>", false, "t");
  EXPECT_EQ(plain.category, Category::donation);
  EXPECT_FALSE(plain.funds_cents);
}

TEST(Rates, UsdImplicitOtherwiseRequired) {
  auto t = rates("code,rate_to_usd,asof\nEUR,1.1,2024-01-01\n");
  EXPECT_EQ(t.to_usd("USD"), 1.0);
  EXPECT_DOUBLE_EQ(t.to_usd("EUR"), 1.1);
  EXPECT_THROW(t.to_usd("CHF"), cg::ValidationError);
}

TEST(Aggregate, MissingRateIsValidationError) {
  mt::CampaignMetrics m;
  m.platform = "GoFundMe";
  m.extracted_id = "x";
  m.category = Category::crowdfunding;
  m.funds_cents = 100;
  m.currency = "CHF";
  m.supporters = 1;
  m.status = mt::Status::ongoing;
  EXPECT_THROW(mt::aggregate({m}, {hit(Category::crowdfunding, "GoFundMe", "x")}, rates("code,rate_to_usd,asof\n")),
               cg::ValidationError);
}

TEST(Aggregate, EmptyIdCountsUrlsNotProfiles) {
  auto rows = mt::aggregate({}, {hit(Category::donation, "Patreon", ""), hit(Category::donation, "Patreon", "a")},
                            rates("code,rate_to_usd,asof\n"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].url_count, 2u);
  EXPECT_EQ(rows[0].distinct_ids, 1u);
}

TEST(FixturePath, RejectsTraversal) {
  EXPECT_THROW(mt::fixture_path("/tmp", "GoFundMe", "../etc"), cg::ValidationError);
  EXPECT_EQ(mt::fixture_path("/r", "PayPal/donate", "AB1", true), std::filesystem::path("/r/paypal-donate/AB1.json"));
}

TEST(MetricsCsv, RoundTrip) {
  mt::CampaignMetrics m;
  m.platform = "Kickstarter";
  m.extracted_id = "u/p";
  m.category = Category::crowdfunding;
  m.funds_cents = 12345;
  m.currency = "USD";
  m.supporters = 3;
  m.model = mt::Model::all_or_nothing;
  m.status = mt::Status::succeeded;
  m.goal_cents = 10000;
  m.fetched_at = "2024-01-01T00:00:00Z";
  auto p = std::filesystem::temp_directory_path() / "cg_metrics_rt.csv";
  mt::write_metrics(p, {m});
  auto back = mt::read_metrics(p);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], m);
  std::filesystem::remove(p);
}
