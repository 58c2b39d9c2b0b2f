//! Fixture corpora and brute-force oracles shared by the integration tests.
#![allow(dead_code, clippy::type_complexity, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use histograph::ingest::{
    normalize_author, normalize_key, normalize_number, parse_cited_ref, BibRecord,
};
use histograph::network::{build_network, CitationNetwork, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const JOURNAL: &str = "BIOLOGICAL BULLETIN";

/// `AUTHOR, YEAR, BIOL BULL, Vvol, Ppage`
pub fn cite(author: &str, year: i32, vol: &str, page: &str) -> String {
    format!("{author}, {year}, BIOL BULL, V{vol}, P{page}")
}

/// How a record is cited by others.
pub fn cite_record(r: &BibRecord) -> String {
    cite(
        r.authors.first().map(String::as_str).unwrap_or(""),
        r.pub_year,
        r.volume.as_deref().unwrap_or(""),
        r.begin_page.as_deref().unwrap_or(""),
    )
}

/// Letters-only name derived from an integer, so stub authors never collide.
pub fn letters(mut n: u32) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (n % 26) as u8);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

// ---------------------------------------------------------------------------
// Citation matrix fixture: 8884 nodes, rows of the printed partial view.

pub const MATRIX_NODES: u32 = 8884;

pub struct MatrixRow {
    pub id: u32,
    pub year: i32,
    pub author: &'static str,
    pub gcs: u32,
    pub lcs: u32,
    pub cited: &'static [u32],
    pub citing: &'static [u32],
}

pub const FRANCIS_1: u32 = 4306;
pub const FRANCIS_2: u32 = 4307;

pub const MATRIX_ROWS: [MatrixRow; 10] = [
    MatrixRow {
        id: 1,
        year: 1945,
        author: "VONBONDE C",
        gcs: 3,
        lcs: 1,
        cited: &[],
        citing: &[17],
    },
    MatrixRow {
        id: 4301,
        year: 1972,
        author: "ZEUTHEN E",
        gcs: 5,
        lcs: 0,
        cited: &[1397],
        citing: &[],
    },
    MatrixRow {
        id: 4302,
        year: 1973,
        author: "ATWOOD DG",
        gcs: 20,
        lcs: 6,
        cited: &[3309],
        citing: &[4547, 4845, 5007, 5810, 7143, 7534],
    },
    MatrixRow {
        id: 4303,
        year: 1973,
        author: "BRITZ SJ",
        gcs: 7,
        lcs: 0,
        cited: &[1870],
        citing: &[],
    },
    MatrixRow {
        id: 4304,
        year: 1973,
        author: "BUCK J",
        gcs: 21,
        lcs: 3,
        cited: &[3429],
        citing: &[4581, 4842, 5169],
    },
    MatrixRow {
        id: 4305,
        year: 1973,
        author: "ELDER HY",
        gcs: 33,
        lcs: 1,
        cited: &[3452, 3483, 3874],
        citing: &[4418],
    },
    MatrixRow {
        id: FRANCIS_1,
        year: 1973,
        author: "FRANCIS L",
        gcs: 111,
        lcs: 22,
        cited: &[4307],
        citing: &[
            4307, 4538, 4717, 4840, 4903, 5002, 5214, 5377, 5380, 5610, 5746, 5782, 6196, 6208,
            6213, 6764, 6766, 6782, 6956, 7292, 7412, 8731,
        ],
    },
    MatrixRow {
        id: FRANCIS_2,
        year: 1973,
        author: "FRANCIS L",
        gcs: 140,
        lcs: 31,
        cited: &[4306],
        citing: &[
            4306, 4717, 4840, 4842, 4903, 5002, 5214, 5377, 5380, 5610, 5746, 5782, 5948, 6003,
            6142, 6184, 6196, 6213, 6405, 6764, 6766, 6782, 6941, 6956, 6987, 7065, 7188, 7217,
            7292, 8069, 8731,
        ],
    },
    MatrixRow {
        id: 4308,
        year: 1973,
        author: "FRANZ DR",
        gcs: 14,
        lcs: 3,
        cited: &[],
        citing: &[6532, 7608, 8444],
    },
    MatrixRow {
        id: 4309,
        year: 1973,
        author: "FRIESEN LJ",
        gcs: 19,
        lcs: 0,
        cited: &[],
        citing: &[],
    },
];

/// Nodes co-citing both FRANCIS papers, as read off the two printed lists.
pub const FRANCIS_COMMON_CITERS: [u32; 18] = [
    4717, 4840, 4903, 5002, 5214, 5377, 5380, 5610, 5746, 5782, 6196, 6213, 6764, 6766, 6782, 6956,
    7292, 8731,
];

pub const WEBSTER: u32 = 4555;
pub const WEBSTER_CITED: [u32; 4] = [1246, 3281, 3342, 4167];
pub const ULBRICHT: u32 = 4167;
pub const JOHANSEN: u32 = 3342;
pub const GIESE: u32 = 3281;

fn matrix_year(id: u32) -> i32 {
    if let Some(row) = MATRIX_ROWS.iter().find(|r| r.id == id) {
        return row.year;
    }
    match id {
        1 => 1945,
        2..=4301 => 1945 + ((id - 1) * 28 / 4301) as i32,
        4302..=4309 => 1973,
        _ => 1974 + ((id - 4310) * 30 / (MATRIX_NODES - 4309)) as i32,
    }
}

fn matrix_author(id: u32) -> String {
    if let Some(row) = MATRIX_ROWS.iter().find(|r| r.id == id) {
        return row.author.to_string();
    }
    match id {
        WEBSTER => "WEBSTER SK".into(),
        ULBRICHT => "ULBRICHT RJ".into(),
        JOHANSEN => "JOHANSEN K".into(),
        GIESE => "GIESE AC".into(),
        _ => format!("Q{} X", letters(id)),
    }
}

/// Node ids whose local links are fully specified by the fixture.
pub fn matrix_special_ids() -> BTreeSet<u32> {
    let mut s: BTreeSet<u32> = MATRIX_ROWS.iter().map(|r| r.id).collect();
    s.insert(WEBSTER);
    s.extend(WEBSTER_CITED);
    s
}

/// The specified `(citing, cited)` pairs.
pub fn matrix_fixture_edges() -> BTreeSet<(u32, u32)> {
    let mut edges = BTreeSet::new();
    for row in &MATRIX_ROWS {
        for &c in row.cited {
            edges.insert((row.id, c));
        }
        for &c in row.citing {
            edges.insert((c, row.id));
        }
    }
    for c in WEBSTER_CITED {
        edges.insert((WEBSTER, c));
    }
    edges.insert((ULBRICHT, JOHANSEN));
    edges.insert((JOHANSEN, GIESE));
    edges
}

fn matrix_stub(id: u32) -> BibRecord {
    let year = matrix_year(id);
    BibRecord {
        record_id: format!("WOS:{id:015}"),
        authors: vec![matrix_author(id)],
        title: format!("STUDIES ON MARINE ORGANISMS {}", letters(id)),
        source_title: JOURNAL.into(),
        doc_type: "Article".into(),
        pub_year: year,
        volume: Some((88 + year - 1945).to_string()),
        begin_page: Some(id.to_string()),
        global_cites: MATRIX_ROWS
            .iter()
            .find(|r| r.id == id)
            .map_or(id % 41, |r| r.gcs),
        addresses: vec![format!(
            "UNIV {}, DEPT BIOL, WOODS HOLE, MA 02543 USA",
            letters(id % 97)
        )],
        ..Default::default()
    }
}

/// 8884 records whose node numbers coincide with the printed ones. With a
/// seed, unrelated nodes also get random local and outer references that
/// never touch the specified rows.
pub fn matrix_records(background_seed: Option<u64>) -> Vec<BibRecord> {
    let mut records: Vec<BibRecord> = (1..=MATRIX_NODES).map(matrix_stub).collect();
    let mut edges = matrix_fixture_edges();
    if let Some(seed) = background_seed {
        let special = matrix_special_ids();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for citing in 2..=MATRIX_NODES {
            if special.contains(&citing) {
                continue;
            }
            for _ in 0..rng.gen_range(0..4) {
                let cited = rng.gen_range(1..citing);
                if !special.contains(&cited) {
                    edges.insert((citing, cited));
                }
            }
        }
    }
    let keys: Vec<String> = records.iter().map(cite_record).collect();
    for &(citing, cited) in &edges {
        records[citing as usize - 1]
            .cited_refs
            .push(keys[cited as usize - 1].clone());
    }
    if let Some(seed) = background_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for r in &mut records {
            if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..200u32);
                r.cited_refs.push(format!(
                    "OUT{} Z, {}, J EXP ZOOL, V{}, P{}",
                    letters(k),
                    1900 + k % 90,
                    k % 50 + 1,
                    k * 3 + 1
                ));
            }
        }
    }
    records
}

// ---------------------------------------------------------------------------
// Missing-links fixture: ids 20, 28, 69 and 173 as in the printed report.

pub const SPIEGELMAN_RAW: &str = "SPIEGELMAN S, 1945, UNPUB BIOL B, V89";
pub const MILLER_RAW: &str = "MILLER MA, 1946, BIOL B, V90, P121";

struct Special {
    id: u32,
    authors: &'static [&'static str],
    page: u32,
    issue: &'static str,
    end_page: Option<u32>,
    title: &'static str,
}

const MISSING_SPECIALS: [Special; 4] = [
    Special {
        id: 20,
        authors: &["SPIEGELMAN S", "STEINBACH HB"],
        page: 254,
        issue: "3",
        end_page: Some(268),
        title: "SUBSTRATE-ENZYME ORIENTATION DURING EMBRYONIC DEVELOPMENT",
    },
    Special { id: 28, authors: &["SPIEGELMAN S"], page: 122, issue: "", end_page: None, title: "ENZYMATIC ADAPTATION" },
    Special { id: 69, authors: &["MILLER MA"], page: 122, issue: "", end_page: None, title: "TOXIC EFFECTS OF COPPER" },
    Special {
        id: 173,
        authors: &["LYNCH WF"],
        page: 115,
        issue: "2",
        end_page: Some(150),
        title: "THE BEHAVIOR AND METAMORPHOSIS OF THE LARVA OF BUGULA-NERITINA (LINNAEUS) - EXPERIMENTAL MODIFICATION OF THE LENGTH OF THE FREE-SWIMMING PERIOD AND THE RESPONSES OF THE LARVAE TO LIGHT AND GRAVITY",
    },
];

/// `(year, volume, first id, last id)`; each segment holds at most one special.
const MISSING_SEGMENTS: [(i32, u32, u32, u32); 5] = [
    (1945, 88, 1, 24),
    (1945, 89, 25, 40),
    (1946, 90, 41, 100),
    (1946, 91, 101, 140),
    (1947, 92, 141, 180),
];

pub fn missing_link_records() -> Vec<BibRecord> {
    let mut records = Vec::new();
    for (year, vol, first, last) in MISSING_SEGMENTS {
        let special = MISSING_SPECIALS
            .iter()
            .find(|s| (first..=last).contains(&s.id));
        for id in first..=last {
            let pos = id - first + 1;
            let mut r = BibRecord {
                record_id: format!("WOS:{id:015}"),
                authors: vec![format!("Q{} X", letters(id))],
                title: format!("STUB {}", letters(id)),
                source_title: JOURNAL.into(),
                doc_type: "Article".into(),
                pub_year: year,
                volume: Some(vol.to_string()),
                global_cites: id % 7,
                ..Default::default()
            };
            let page = match special {
                Some(s) if s.id == id => {
                    r.authors = s.authors.iter().map(|a| a.to_string()).collect();
                    r.title = s.title.into();
                    r.issue = (!s.issue.is_empty()).then(|| s.issue.to_string());
                    r.end_page = s.end_page.map(|p| p.to_string());
                    s.page
                }
                Some(s) if id > s.id => s.page + (id - s.id),
                _ => pos,
            };
            r.begin_page = Some(page.to_string());
            records.push(r);
        }
    }
    // A few correct local citations and outer references around the two cases.
    let keys: Vec<String> = records.iter().map(cite_record).collect();
    for id in [5u32, 33, 77, 150] {
        records[id as usize - 1]
            .cited_refs
            .push(keys[id as usize - 2].clone());
        records[id as usize - 1]
            .cited_refs
            .push("LOWRY OH, 1951, J BIOL CHEM, V193, P265".into());
    }
    records[19].cited_refs.push(keys[2].clone());
    records[19].cited_refs.push(SPIEGELMAN_RAW.into());
    records[172].cited_refs.push(MILLER_RAW.into());
    records[172].cited_refs.push(keys[40].clone());
    records
}

// ---------------------------------------------------------------------------
// Outer-references fixture.

/// `(reference, number of distinct citing nodes)`
pub const OUTER_COUNTS: [(&str, u32); 7] = [
    ("LOWRY OH, 1951, J BIOL CHEM, V193, P265", 103),
    ("SOKAL RR, 1981, BIOMETRY", 64),
    ("LAEMMLI UK, 1970, NATURE, V227, P680", 53),
    ("BRADFORD MM, 1976, ANAL BIOCHEM, V72, P248", 51),
    ("THORSON G, 1946, MEDD KOMM DAN FISK P, V4, P1", 51),
    ("LILLIE FR, 1915, BIOL BULL, V28, P22", 11),
    ("WILSON EB, 1903, BIOL BULL, V4, P197", 11),
];

pub fn outer_records(n: u32) -> Vec<BibRecord> {
    let mut records: Vec<BibRecord> = (1..=n)
        .map(|i| BibRecord {
            record_id: format!("WOS:{i:015}"),
            authors: vec![format!("Q{} X", letters(i))],
            title: format!("STUB {}", letters(i)),
            source_title: JOURNAL.into(),
            pub_year: 1960 + (i % 40) as i32,
            volume: Some((100 + i % 40).to_string()),
            begin_page: Some(i.to_string()),
            ..Default::default()
        })
        .collect();
    for (k, (raw, count)) in OUTER_COUNTS.iter().enumerate() {
        for j in 0..*count {
            let idx = (j * 7 + k as u32 * 13) % n;
            // Same work, varied surface form: grouping must go by key.
            let form = if j % 5 == 0 {
                raw.replace(", ", ",  ")
            } else {
                raw.to_string()
            };
            records[idx as usize].cited_refs.push(form);
        }
    }
    records
}

// ---------------------------------------------------------------------------
// Random corpora.

const SURNAMES: [&str; 7] = [
    "SMITH", "JONES", "GARCIA", "MULLER", "ROSSI", "TANAKA", "VAN-DYKE",
];
const INITIALS: [&str; 4] = ["A", "B", "JR", "MK"];
const WORDS: [&str; 10] = [
    "CELL", "LARVA", "GROWTH", "THE", "OF", "SEA", "URCHIN", "MEMBRANE", "AND", "ENZYME",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mess {
    /// Distinct works per reference list, unique record keys, no self-citation.
    Clean,
    /// Also self-citations, repeated references, colliding record keys and
    /// incomplete references.
    Messy,
}

pub fn random_corpus(seed: u64, max_records: usize, mess: Mess) -> Vec<BibRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=max_records);
    let mut records: Vec<BibRecord> = (0..n)
        .map(|i| {
            let n_auth = rng.gen_range(1..=3);
            let authors = (0..n_auth)
                .map(|_| {
                    format!(
                        "{} {}",
                        SURNAMES.choose(&mut rng).unwrap(),
                        INITIALS.choose(&mut rng).unwrap()
                    )
                })
                .collect();
            let title = (0..rng.gen_range(1..6))
                .map(|_| *WORDS.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ");
            let page = if mess == Mess::Messy && rng.gen_bool(0.1) && i > 0 {
                10 * rng.gen_range(1..=i)
            } else {
                10 * (i + 1)
            };
            BibRecord {
                record_id: format!("R{seed}-{i}"),
                authors,
                title,
                source_title: if rng.gen_bool(0.8) {
                    JOURNAL.into()
                } else {
                    "J EXP ZOOL".into()
                },
                doc_type: ["Article", "Review", "Note"]
                    .choose(&mut rng)
                    .unwrap()
                    .to_string(),
                pub_year: 1950 + rng.gen_range(0..8),
                volume: Some(rng.gen_range(1..4).to_string()),
                begin_page: Some(page.to_string()),
                global_cites: rng.gen_range(0..60),
                addresses: if rng.gen_bool(0.7) {
                    vec![format!(
                        "UNIV {}, DEPT ZOOL, {}",
                        letters(rng.gen_range(0..5)),
                        ["PARIS, FRANCE", "BOSTON, MA USA", "KYOTO, JAPAN"]
                            .choose(&mut rng)
                            .unwrap()
                    )]
                } else {
                    Vec::new()
                },
                ..Default::default()
            }
        })
        .collect();

    let keys: Vec<String> = records.iter().map(cite_record).collect();
    for i in 0..n {
        let mut refs = Vec::new();
        let mut targets: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        targets.shuffle(&mut rng);
        let k = rng.gen_range(0..=targets.len().min(6));
        for &t in &targets[..k] {
            let r = &records[t];
            if rng.gen_bool(0.15) {
                // Pagination slip: never a record key, since pages are multiples of 10.
                let page: u32 = r.begin_page.as_deref().unwrap().parse::<u32>().unwrap() + 1;
                refs.push(cite(
                    &r.authors[0],
                    r.pub_year,
                    r.volume.as_deref().unwrap(),
                    &page.to_string(),
                ));
            } else {
                refs.push(keys[t].clone());
            }
        }
        let mut outer: Vec<u32> = (0..12).collect();
        outer.shuffle(&mut rng);
        for &o in &outer[..rng.gen_range(0..4)] {
            refs.push(format!(
                "OUT{} Z, {}, NATURE, V{}, P{}",
                letters(o),
                1900 + o,
                o + 1,
                o * 7 + 1
            ));
        }
        if mess == Mess::Messy {
            if rng.gen_bool(0.2) {
                refs.push(keys[i].clone());
            }
            if rng.gen_bool(0.2) && !refs.is_empty() {
                // Same work in another surface form; identical lines collapse at ingest.
                let dup = refs[rng.gen_range(0..refs.len())].replacen(", ", ",  ", 1);
                refs.push(dup);
            }
            if rng.gen_bool(0.2) && n > 0 {
                let r = &records[rng.gen_range(0..n)];
                refs.push(format!("{}, {}, BIOL BULL", r.authors[0], r.pub_year));
            }
        }
        refs.shuffle(&mut rng);
        records[i].cited_refs = refs;
    }
    records
}

pub fn random_network(seed: u64, max_records: usize, mess: Mess) -> CitationNetwork {
    build_network(random_corpus(seed, max_records, mess))
}

// ---------------------------------------------------------------------------
// Oracles. These work from the raw records or the edge set only.

/// Resolves every reference by linear scan: lowest-numbered node whose
/// (author, year, volume, page) equals the reference's, all present.
pub fn brute_resolution(net: &CitationNetwork) -> Vec<(NodeId, Option<NodeId>)> {
    let keys: Vec<(NodeId, Option<String>, i32, Option<String>, Option<String>)> = net
        .nodes
        .iter()
        .map(|m| {
            let r = &m.record;
            (
                m.id,
                r.authors
                    .first()
                    .map(|a| normalize_key(&normalize_author(a))),
                r.pub_year,
                r.volume.as_deref().and_then(normalize_number),
                r.begin_page.as_deref().and_then(normalize_number),
            )
        })
        .collect();
    let mut out = Vec::new();
    for node in &net.nodes {
        for raw in &node.record.cited_refs {
            let r = parse_cited_ref(raw);
            let hit = if r.author_key.is_empty()
                || r.year.is_none()
                || r.volume.is_none()
                || r.page.is_none()
            {
                None
            } else {
                keys.iter()
                    .find(|(_, a, y, v, p)| {
                        a.as_deref() == Some(r.author_key.as_str())
                            && Some(*y) == r.year
                            && *v == r.volume
                            && *p == r.page
                    })
                    .map(|k| k.0)
            };
            out.push((node.id, hit));
        }
    }
    out
}

fn cited_sets(net: &CitationNetwork) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut m: BTreeMap<NodeId, BTreeSet<NodeId>> =
        net.nodes.iter().map(|n| (n.id, BTreeSet::new())).collect();
    for &(a, b) in &net.edges {
        m.get_mut(&a).unwrap().insert(b);
    }
    m
}

/// `(a, b) -> witnesses` for every pair with at least one common citer.
pub fn brute_cocitation(net: &CitationNetwork) -> BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>> {
    let cited = cited_sets(net);
    let ids: Vec<NodeId> = net.nodes.iter().map(|n| n.id).collect();
    let mut out = BTreeMap::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let w: BTreeSet<NodeId> = cited
                .iter()
                .filter(|(_, s)| s.contains(&a) && s.contains(&b))
                .map(|(&c, _)| c)
                .collect();
            if !w.is_empty() {
                out.insert((a, b), w);
            }
        }
    }
    out
}

pub fn brute_coupling(net: &CitationNetwork) -> BTreeMap<(NodeId, NodeId), BTreeSet<NodeId>> {
    let cited = cited_sets(net);
    let ids: Vec<NodeId> = net.nodes.iter().map(|n| n.id).collect();
    let mut out = BTreeMap::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let w: BTreeSet<NodeId> = cited[&a].intersection(&cited[&b]).copied().collect();
            if !w.is_empty() {
                out.insert((a, b), w);
            }
        }
    }
    out
}

/// Union-find over the given links; components of two or more, as sorted sets.
pub fn union_find_components(
    n: usize,
    links: impl IntoIterator<Item = (NodeId, NodeId)>,
) -> BTreeSet<Vec<NodeId>> {
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut touched = BTreeSet::new();
    for (a, b) in links {
        let (ra, rb) = (
            find(&mut parent, a.0 as usize),
            find(&mut parent, b.0 as usize),
        );
        parent[ra] = rb;
        touched.insert(a.0 as usize);
        touched.insert(b.0 as usize);
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for x in touched {
        let r = find(&mut parent, x);
        groups.entry(r).or_default().push(NodeId(x as u32));
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

/// All-pairs shortest hop counts along citing -> cited edges (Floyd–Warshall).
pub fn shortest_hops(net: &CitationNetwork) -> Vec<Vec<Option<usize>>> {
    let n = net.len();
    let mut d = vec![vec![None; n + 1]; n + 1];
    for i in 1..=n {
        d[i][i] = Some(0);
    }
    for &(a, b) in &net.edges {
        d[a.0 as usize][b.0 as usize] = Some(1);
    }
    for k in 1..=n {
        for i in 1..=n {
            let Some(ik) = d[i][k] else { continue };
            for j in 1..=n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|v| ik + kj < v) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

// ---------------------------------------------------------------------------
// Bundle link checker.

fn attr_values<'a>(html: &'a str, attr: &str) -> Vec<&'a str> {
    let pat = format!("{attr}=\"");
    let mut out = Vec::new();
    let mut rest = html;
    while let Some(i) = rest.find(&pat) {
        rest = &rest[i + pat.len()..];
        if let Some(end) = rest.find('"') {
            out.push(&rest[..end]);
            rest = &rest[end..];
        }
    }
    out
}

fn unescape(s: &str) -> String {
    s.replace("&amp;", "&")
        .replace("&quot;", "\"")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&#39;", "'")
}

/// Every `.html` file under `dir`.
pub fn html_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "html") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

/// Broken internal links as `page -> href` strings. External `http(s):`
/// links are ignored; fragments must name an `id` in the target page.
pub fn broken_links(dir: &Path) -> Vec<String> {
    let root = dir.canonicalize().unwrap();
    let mut ids_cache: BTreeMap<PathBuf, HashSet<String>> = BTreeMap::new();
    let mut broken = Vec::new();
    for page in html_files(dir) {
        let html = fs::read_to_string(&page).unwrap();
        for href in attr_values(&html, "href")
            .into_iter()
            .chain(attr_values(&html, "src"))
        {
            let href = unescape(href);
            if href.starts_with("http://")
                || href.starts_with("https://")
                || href.starts_with("mailto:")
            {
                continue;
            }
            let (file, frag) = match href.split_once('#') {
                Some((f, g)) => (f, Some(g)),
                None => (href.as_str(), None),
            };
            let target = if file.is_empty() {
                page.clone()
            } else {
                page.parent().unwrap().join(file)
            };
            let Ok(target) = target.canonicalize() else {
                broken.push(format!("{} -> {href}", page.display()));
                continue;
            };
            if !target.starts_with(&root) || !target.is_file() {
                broken.push(format!("{} -> {href}", page.display()));
                continue;
            }
            if let Some(frag) = frag {
                let ids = ids_cache.entry(target.clone()).or_insert_with(|| {
                    let text = fs::read_to_string(&target).unwrap_or_default();
                    attr_values(&text, "id")
                        .into_iter()
                        .map(str::to_string)
                        .collect()
                });
                if !ids.contains(frag) {
                    broken.push(format!("{} -> {href}", page.display()));
                }
            }
        }
    }
    broken
}
