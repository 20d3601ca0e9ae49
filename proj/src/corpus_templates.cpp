// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "x402guard/corpus_gen.hpp"

// Authored corpus assets. Template text is kept detector-clean on purpose:
// no '@' or "%40" outside injected surfaces, no digit runs that could read
// as an identifier, no adjacent capitalised words, and slot boundaries are
// never '.', '-', '+', or a digit so injected surfaces keep their own
// word boundaries. The no-stray test in the generator suite enforces this.

namespace x402guard::corpus {

std::vector<SurfaceForm> default_surface_forms() {
  using ET = EntityType;
  std::vector<SurfaceForm> forms;

  forms.push_back({"email_bare", ET::EMAIL_ADDRESS, Placement::EITHER, 0.50,
                   {"alice.martin@example.com", "lars.eriksson@mail.example",
                    "wei.chen@corp.example"}});
  forms.push_back({"email_pct40", ET::EMAIL_ADDRESS, Placement::URL_PATH, 0.25,
                   {"alice.martin%40example.com", "lars.eriksson%40mail.example",
                    "wei.chen%40corp.example"}});
  forms.push_back({"email_query", ET::EMAIL_ADDRESS, Placement::URL_EMAIL_QUERY, 0.25,
                   {"alice.martin@example.com", "lars.eriksson@mail.example",
                    "wei.chen@corp.example"}});

  forms.push_back({"full_john_smith", ET::PERSON, Placement::TEXT, 0.11, {"John Smith"}});
  forms.push_back({"full_maria_garcia", ET::PERSON, Placement::TEXT, 0.11, {"Maria Garcia"}});
  forms.push_back({"full_wei_chen", ET::PERSON, Placement::TEXT, 0.11, {"Wei Chen"}});
  forms.push_back({"full_aisha_patel", ET::PERSON, Placement::TEXT, 0.11, {"Aisha Patel"}});
  forms.push_back({"full_lars_eriksson", ET::PERSON, Placement::TEXT, 0.11, {"Lars Eriksson"}});
  forms.push_back({"slug_hyphen_john_smith", ET::PERSON, Placement::URL_PATH, 0.09,
                   {"john-smith"}});
  forms.push_back({"slug_hyphen_maria_garcia", ET::PERSON, Placement::URL_PATH, 0.09,
                   {"maria-garcia"}});
  forms.push_back({"slug_underscore_john_smith", ET::PERSON, Placement::URL_PATH, 0.08,
                   {"john_smith"}});
  forms.push_back({"abbrev_j_smith", ET::PERSON, Placement::URL_PATH, 0.07, {"J.Smith"}});
  forms.push_back({"last_first_garcia_maria", ET::PERSON, Placement::URL_PATH, 0.06,
                   {"Garcia,Maria"}});
  forms.push_back({"first_only_aisha", ET::PERSON, Placement::URL_PATH, 0.06, {"Aisha"}});

  forms.push_back({"phone_dashed", ET::PHONE_NUMBER, Placement::TEXT, 0.30,
                   {"415-555-0182", "212-555-0143", "702-555-0168"}});
  forms.push_back({"phone_paren", ET::PHONE_NUMBER, Placement::TEXT, 0.25,
                   {"(415) 555-0182", "(212) 555-0143", "(702) 555-0168"}});
  forms.push_back({"phone_dotted", ET::PHONE_NUMBER, Placement::TEXT, 0.23,
                   {"415.555.0182", "212.555.0143", "702.555.0168"}});
  forms.push_back({"phone_compact_intl", ET::PHONE_NUMBER, Placement::TEXT, 0.22,
                   {"+14155550182", "+12125550143", "+17025550168"}});

  forms.push_back({"ssn_dashed", ET::US_SSN, Placement::EITHER, 0.70,
                   {"312-45-6789", "529-33-1472", "418-70-5521"}});
  forms.push_back({"ssn_compact", ET::US_SSN, Placement::EITHER, 0.30,
                   {"312456789", "529331472", "418705521"}});

  forms.push_back({"cc_bare16", ET::CREDIT_CARD, Placement::EITHER, 1.0,
                   {"4111111111111111", "4012888888881881", "5105105105105100",
                    "5500005555555559"}});

  forms.push_back({"iban_de", ET::IBAN_CODE, Placement::EITHER, 0.50,
                   {"DE89370400440532013000"}});
  forms.push_back({"iban_gb", ET::IBAN_CODE, Placement::EITHER, 0.50,
                   {"GB82WEST12345698765432"}});

  return forms;
}

namespace {

CategoryConfig ai_inference() {
  CategoryConfig c;
  c.name = "ai_inference";
  c.weight = 0.18;
  c.entity_weights = {{EntityType::EMAIL_ADDRESS, 0.55}, {EntityType::PERSON, 0.45}};
  c.templates.url_clean = {
      "https://api.inference.example/v2/models/sonar-lite/infer?job={id}",
      "https://api.inference.example/v2/models/vista-xl/completions?batch={id}",
      "https://api.inference.example/v1/jobs/{id}/status",
  };
  c.templates.url_path_slot = {
      "https://api.inference.example/v2/tenants/{}/models/sonar-lite/infer",
      "https://api.inference.example/v1/operators/{}/quota",
      "https://api.inference.example/v2/workspaces/{}/runs/{id}",
  };
  c.templates.url_query_slot = {
      "https://api.inference.example/v2/models/vista-xl/infer?requester={}&job={id}",
      "https://api.inference.example/v1/usage/export?account={}&window=24h",
  };
  c.templates.url_email_query_slot = {
      "https://api.inference.example/v1/notify?email={}&job={id}",
  };
  c.templates.desc_clean = {
      "Chat completion batch {id} on the sonar-lite checkpoint",
      "Scheduled inference run {id} with streaming disabled",
      "Token usage export for billing cycle {id}",
      "Prompt evaluation suite {id} against the staging checkpoint",
  };
  c.templates.desc_slot = {
      "Inference batch {id} requested by {} under the shared quota",
      "Completion run for {} with the default sampling profile",
      "Usage report {id} covering requests from {} this cycle",
  };
  c.templates.reason_clean = {
      "automated retry of job {id} after an upstream timeout",
      "capacity probe {id} ahead of the evening batch window",
      "routine eval pass {id} for the release gate",
      "scheduled warmup call for pool {id}",
  };
  c.templates.reason_slot = {
      "requested by {} for run {id}",
      "owner={}; job={id}",
      "billing contact {} approved charge {id}",
  };
  return c;
}

CategoryConfig data_access() {
  CategoryConfig c;
  c.name = "data_access";
  c.weight = 0.18;
  c.entity_weights = {{EntityType::EMAIL_ADDRESS, 0.42},
                      {EntityType::PERSON, 0.33},
                      {EntityType::US_SSN, 0.17},
                      {EntityType::IBAN_CODE, 0.08}};
  c.templates.url_clean = {
      "https://data.vault.example/v1/datasets/ops-metrics/export?cursor={id}",
      "https://data.vault.example/v2/tables/shipments/rows?page={id}",
      "https://data.vault.example/v1/snapshots/{id}/download",
  };
  c.templates.url_path_slot = {
      "https://data.vault.example/v1/owners/{}/datasets",
      "https://data.vault.example/v2/records/{}/history",
      "https://data.vault.example/v1/grants/{}/scope/read",
  };
  c.templates.url_query_slot = {
      "https://data.vault.example/v1/records/export?subject={}&cursor={id}",
      "https://data.vault.example/v2/audit/rows?actor={}&page={id}",
  };
  c.templates.url_email_query_slot = {
      "https://data.vault.example/v1/shares?email={}&snapshot={id}",
  };
  c.templates.desc_clean = {
      "Row export {id} from the shipments table",
      "Nightly snapshot {id} of the ops-metrics dataset",
      "Schema migration dry run {id} on the staging replica",
      "Access review export {id} for the storage tier",
  };
  c.templates.desc_slot = {
      "Record history export {id} for subject {} from the primary replica",
      "Dataset share {id} granted to {} with read scope",
      "Row-level audit extract for {} requested via the console",
  };
  c.templates.reason_clean = {
      "quarterly access review batch {id}",
      "reconciliation of snapshot {id} against the warehouse",
      "retention sweep {id} on expired rows",
      "index rebuild verification for shard {id}",
  };
  c.templates.reason_slot = {
      "subject={}; ticket={id}",
      "export requested for {} under case {id}",
      "data subject request {id} filed by {}",
  };
  return c;
}

CategoryConfig medical() {
  CategoryConfig c;
  c.name = "medical";
  c.weight = 0.15;
  c.entity_weights = {{EntityType::PERSON, 0.55}, {EntityType::US_SSN, 0.45}};
  c.templates.url_clean = {
      "https://api.medrecords.example/v1/wards/intake/summary?day={id}",
      "https://api.medrecords.example/v2/claims/{id}/status",
      "https://api.medrecords.example/v1/schedules/clinic-north?week={id}",
  };
  c.templates.url_path_slot = {
      "https://api.medrecords.example/v1/patients/{}/records",
      "https://api.medrecords.example/v2/referrals/{}/summary",
      "https://api.medrecords.example/v1/charts/{}/export",
  };
  c.templates.url_query_slot = {
      "https://api.medrecords.example/v1/claims/lookup?member={}&case={id}",
      "https://api.medrecords.example/v2/records/export?patient={}&batch={id}",
  };
  c.templates.desc_clean = {
      "Ward intake summary {id} for the morning shift",
      "Claim adjudication batch {id} from the clearing queue",
      "Discharge paperwork bundle {id} for the north clinic",
      "Lab result sync {id} from the imaging partner",
  };
  c.templates.desc_slot = {
      "Export medical records for {} under case {id}",
      "Referral summary {id} prepared for {}",
      "Chart access for {} requested by the on-call clinician",
  };
  c.templates.reason_clean = {
      "insurer requested claim bundle {id}",
      "scheduled archive of ward records batch {id}",
      "compliance spot check {id} on access logs",
      "intake reconciliation for clinic day {id}",
  };
  c.templates.reason_slot = {
      "patient={}; claim={id}",
      "records release for {} authorized under case {id}",
      "chart review for {} before the transfer",
  };
  return c;
}

CategoryConfig compute() {
  CategoryConfig c;
  c.name = "compute";
  c.weight = 0.13;
  c.entity_weights = {{EntityType::EMAIL_ADDRESS, 0.50},
                      {EntityType::PERSON, 0.40},
                      {EntityType::PHONE_NUMBER, 0.10}};
  c.templates.url_clean = {
      "https://compute.grid.example/v1/clusters/batch-east/jobs?cursor={id}",
      "https://compute.grid.example/v2/queues/preempt/slots?window={id}",
      "https://compute.grid.example/v1/jobs/{id}/artifacts",
  };
  c.templates.url_path_slot = {
      "https://compute.grid.example/v1/users/{}/jobs",
      "https://compute.grid.example/v2/leases/{}/renew",
      "https://compute.grid.example/v1/namespaces/{}/usage",
  };
  c.templates.url_query_slot = {
      "https://compute.grid.example/v1/jobs/submit?owner={}&queue=batch-east",
      "https://compute.grid.example/v2/usage/export?holder={}&cursor={id}",
  };
  c.templates.url_email_query_slot = {
      "https://compute.grid.example/v1/alerts?email={}&job={id}",
  };
  c.templates.desc_clean = {
      "Spot allocation {id} on the batch-east cluster",
      "Checkpoint upload {id} for the preempt queue",
      "Node pool resize {id} ahead of the weekend load",
      "Artifact sync {id} from the build runners",
  };
  c.templates.desc_slot = {
      "Job bundle {id} submitted by {} on the preempt queue",
      "Lease renewal for {} covering eight gpu slots",
      "Usage rollup {id} attributed to {} for the cycle",
  };
  c.templates.reason_clean = {
      "requeue of job {id} after node drain",
      "burst capacity request {id} for the training run",
      "license check {id} for the solver pool",
      "cleanup pass {id} on orphaned volumes",
  };
  c.templates.reason_slot = {
      "on-call contact {} for job {id}",
      "owner={}; lease={id}",
      "escalation path {} while the queue is saturated",
  };
  return c;
}

CategoryConfig media() {
  CategoryConfig c;
  c.name = "media";
  c.weight = 0.13;
  c.entity_weights = {{EntityType::EMAIL_ADDRESS, 0.50},
                      {EntityType::PERSON, 0.40},
                      {EntityType::PHONE_NUMBER, 0.10}};
  c.templates.url_clean = {
      "https://media.stream.example/v1/channels/newsdesk/manifests?rev={id}",
      "https://media.stream.example/v2/transcodes/{id}/status",
      "https://media.stream.example/v1/catalog/refresh?cursor={id}",
  };
  c.templates.url_path_slot = {
      "https://media.stream.example/v1/creators/{}/uploads",
      "https://media.stream.example/v2/playlists/{}/items",
      "https://media.stream.example/v1/royalties/{}/statement",
  };
  c.templates.url_query_slot = {
      "https://media.stream.example/v1/uploads/grant?uploader={}&rev={id}",
      "https://media.stream.example/v2/reports/plays?owner={}&window=7d",
  };
  c.templates.url_email_query_slot = {
      "https://media.stream.example/v1/digest?email={}&list={id}",
  };
  c.templates.desc_clean = {
      "Transcode pass {id} for the newsdesk channel",
      "Thumbnail refresh {id} across the evening catalog",
      "Caption sync {id} for the weekly upload batch",
      "Bitrate ladder rebuild {id} on the origin tier",
  };
  c.templates.desc_slot = {
      "Upload session {id} opened by {} for review",
      "Royalty statement {id} addressed to {}",
      "Rights clearance for {} on the highlight reel",
  };
  c.templates.reason_clean = {
      "replay of transcode {id} after codec update",
      "catalog integrity sweep {id}",
      "origin cache warmup for region batch {id}",
      "weekly rights audit {id}",
  };
  c.templates.reason_slot = {
      "support callback {} for ticket {id}",
      "uploader={}; session={id}",
      "clearance contact {} pending label reply",
  };
  return c;
}

CategoryConfig financial() {
  CategoryConfig c;
  c.name = "financial";
  c.weight = 0.13;
  c.entity_weights = {{EntityType::IBAN_CODE, 0.75}, {EntityType::CREDIT_CARD, 0.25}};
  c.templates.url_clean = {
      "https://pay.ledger.example/v1/invoices/{id}/summary",
      "https://pay.ledger.example/v2/settlements/daily?book={id}",
      "https://pay.ledger.example/v1/rates/spot?pair=usd-eur&tick={id}",
  };
  // IBAN and card surfaces only ever land in query params or text, so this
  // category carries no path or email-query slots.
  c.templates.url_query_slot = {
      "https://pay.ledger.example/v1/payouts/preview?account={}&invoice={id}",
      "https://pay.ledger.example/v2/refunds/queue?instrument={}&batch={id}",
      "https://pay.ledger.example/v1/mandates/check?iban={}&book={id}",
  };
  c.templates.desc_clean = {
      "Settlement digest {id} for the daily book",
      "Invoice rollup {id} across open mandates",
      "Spot rate snapshot {id} for treasury review",
      "Chargeback summary {id} from the acquiring bank",
  };
  c.templates.desc_slot = {
      "Refund batch {id} routed to {}",
      "Mandate verification for {} before payout",
      "Payout preview {id} against instrument {}",
  };
  c.templates.reason_clean = {
      "daily close reconciliation {id}",
      "treasury sweep {id} into the reserve book",
      "auditor sample pull {id}",
      "fee schedule sync {id}",
  };
  c.templates.reason_slot = {
      "beneficiary={}; invoice={id}",
      "card on file {} pending verification",
      "settle against {} for order {id}",
  };
  return c;
}

CategoryConfig generic() {
  CategoryConfig c;
  c.name = "generic";
  c.weight = 0.10;
  c.entity_weights = {{EntityType::EMAIL_ADDRESS, 0.50},
                      {EntityType::PERSON, 0.35},
                      {EntityType::PHONE_NUMBER, 0.15}};
  c.templates.url_clean = {
      "https://api.portal.example/v1/status/components?probe={id}",
      "https://api.portal.example/v2/webhooks/{id}/deliveries",
      "https://api.portal.example/v1/exports/catalog?cursor={id}",
  };
  c.templates.url_path_slot = {
      "https://api.portal.example/v1/accounts/{}/profile",
      "https://api.portal.example/v2/teams/{}/members",
      "https://api.portal.example/v1/sessions/{}/revoke",
  };
  c.templates.url_query_slot = {
      "https://api.portal.example/v1/lookup?handle={}&page={id}",
      "https://api.portal.example/v2/invites/resend?target={}&batch={id}",
  };
  c.templates.url_email_query_slot = {
      "https://api.portal.example/v1/subscriptions?email={}&plan=team",
  };
  c.templates.desc_clean = {
      "Webhook redelivery batch {id} for the payments topic",
      "Catalog export {id} with draft entries excluded",
      "Component health probe {id} across regions",
      "Session cleanup {id} for stale tokens",
  };
  c.templates.desc_slot = {
      "Invite resend {id} for {} on the team plan",
      "Profile export for {} requested from the console",
      "Contact update {id} submitted by {}",
  };
  c.templates.reason_clean = {
      "scheduled digest {id} for the ops channel",
      "token rotation {id} across service accounts",
      "nightly backup verification {id}",
      "webhook retry sweep {id}",
  };
  c.templates.reason_slot = {
      "reach {} if delivery stalls",
      "member={}; invite={id}",
      "support line {} for the rollout window",
  };
  return c;
}

}  // namespace

std::vector<CategoryConfig> default_categories() {
  return {ai_inference(), data_access(), medical(), compute(),
          media(),        financial(),   generic()};
}

}  // namespace x402guard::corpus
