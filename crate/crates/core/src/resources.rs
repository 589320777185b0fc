//! Fixture data for the car-door scenario, embedded at build time.

pub const FIXTURE_LEXICON: &str = include_str!("../resources/lexicon.tsv");
pub const FIXTURE_GRAMMAR: &str = include_str!("../resources/grammar.cfg");
/// The four base rules alone.
pub const BASE_GRAMMAR: &str = include_str!("../resources/base_grammar.cfg");
pub const FIXTURE_HIERARCHY: &str = include_str!("../resources/hierarchy.txt");
pub const FIXTURE_PREPOSITIONS: &str = include_str!("../resources/prepositions.tsv");
pub const FIXTURE_ANTONYMS: &str = include_str!("../resources/antonyms.txt");
pub const FIXTURE_BOM: &str = include_str!("../resources/bom.json");
pub const FIXTURE_COMPONENTS: &str = include_str!("../resources/components.tsv");
pub const FIXTURE_BINDINGS: &str = include_str!("../resources/bindings.tsv");

/// Canonical base definitions as `(type, linear form)`.
pub const FIXTURE_BASE: &[(&str, &str)] = &[
    ("door", include_str!("../resources/base/door.cg")),
    ("hinge", include_str!("../resources/base/hinge.cg")),
    ("interior", include_str!("../resources/base/interior.cg")),
    ("pin", include_str!("../resources/base/pin.cg")),
];

/// Requirements of the hinge design session.
pub const FIXTURE_REQUIREMENTS: &[&str] = &[
    "the pin must rotate the door around the body",
    "the hinge must solidarize the door with the body",
    "A driver must be able to open and close the door",
];

/// Sentences the fixture lexicon and grammar cover, at most twelve tokens each.
pub const FIXTURE_SENTENCES: &[&str] = &[
    "Access to the interior of the car",
    "Access to the interior of the car for the driver",
    "the pin must rotate the door around the body",
    "the hinge must solidarize the door with the body",
    "A driver must be able to open and close the door",
    "the driver must not open the door",
    "a passenger can open the window",
    "the door is on the body",
    "the frame must support the window",
    "the hinge must hold the leaf",
    "the driver shall lock the door",
    "the passenger may close the window",
    "the pin can rotate the leaf around the hinge",
    "the hinge-pin must hold the leaves",
];
