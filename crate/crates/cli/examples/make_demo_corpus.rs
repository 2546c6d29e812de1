//! Regenerates the bundled demo corpus under `demo/`: a 456-unit org
//! chart spanning all seven categories, an address directory, a two-week
//! email log with workday/Friday/weekend structure and a broadcast-heavy
//! degree tail, and a pipeline config. Fully deterministic; run with
//! `cargo run -p orgnet-cli --example make_demo_corpus`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const SEED: u64 = 20211220;
/// Midnight of Monday 2021-12-20 UTC.
const MONDAY: i64 = 1_639_958_400;
const DOMAIN: &str = "lab.test";

struct Unit {
    id: String,
    name: String,
    parent: Option<String>,
    category: &'static str,
}

#[derive(Default)]
struct Corpus {
    units: Vec<Unit>,
    /// group unit id -> member addresses
    members: BTreeMap<String, Vec<String>>,
    /// division/office unit id -> all member addresses beneath it
    division_reach: BTreeMap<String, Vec<String>>,
    /// root unit id -> all member addresses beneath it
    root_reach: BTreeMap<String, Vec<String>>,
    directory: Vec<(String, String)>,
    all_users: Vec<String>,
}

fn build_structure() -> Corpus {
    let mut corpus = Corpus::default();
    let mut user = 0usize;
    let mut new_user = |corpus: &mut Corpus, unit: &str| -> String {
        let address = format!("u{user:04}@{DOMAIN}");
        user += 1;
        corpus.directory.push((address.clone(), unit.to_string()));
        corpus.all_users.push(address.clone());
        address
    };

    let roots: [(&str, &str); 8] = [
        ("TD1", "technical-management"),
        ("TD2", "technical-management"),
        ("TD3", "technical-management"),
        ("OD1", "operations-management"),
        ("OD2", "operations-management"),
        ("OD3", "operations-management"),
        ("AD1", "administration"),
        ("AD2", "administration"),
    ];
    for (id, category) in roots {
        corpus.units.push(Unit {
            id: id.to_string(),
            name: format!("Directorate {id}"),
            parent: None,
            category,
        });
        corpus.directory.push((
            format!("dir.{}@{DOMAIN}", id.to_lowercase()),
            id.to_string(),
        ));
        corpus.root_reach.insert(id.to_string(), Vec::new());
    }

    // (division id, root, division category, groups, group category, size)
    let mut division_specs: Vec<(String, String, &str, usize, &str, usize)> = Vec::new();
    for root in ["TD1", "TD2", "TD3"] {
        for k in 1..=4 {
            division_specs.push((
                format!("{root}-D{k}"),
                root.to_string(),
                "technical-management",
                18,
                "technical-group",
                4,
            ));
        }
    }
    for root in ["OD1", "OD2", "OD3"] {
        for k in 1..=4 {
            division_specs.push((
                format!("{root}-D{k}"),
                root.to_string(),
                "operations-management",
                12,
                "operations-group",
                3,
            ));
        }
    }
    for root in ["AD1", "AD2"] {
        for k in 1..=2 {
            division_specs.push((
                format!("{root}-D{k}"),
                root.to_string(),
                "administration",
                6,
                "administration",
                3,
            ));
        }
    }
    let mut group_counter = 0usize;
    for (division, root, category, groups, group_category, group_size) in &division_specs {
        corpus.units.push(Unit {
            id: division.clone(),
            name: format!("Division {division}"),
            parent: Some(root.clone()),
            category,
        });
        let mut reach = Vec::new();
        for _ in 0..*groups {
            group_counter += 1;
            let group_id = format!("G{group_counter:03}");
            corpus.units.push(Unit {
                id: group_id.clone(),
                name: format!("Group {group_id}"),
                parent: Some(division.clone()),
                category: group_category,
            });
            let mut members = Vec::new();
            for _ in 0..*group_size {
                let address = new_user(&mut corpus, &group_id);
                members.push(address.clone());
                reach.push(address);
            }
            corpus.members.insert(group_id, members);
        }
        let lower = division.to_lowercase();
        corpus
            .directory
            .push((format!("mgr.{lower}@{DOMAIN}"), division.clone()));
        for a in 1..=2 {
            corpus
                .directory
                .push((format!("asst{a}.{lower}@{DOMAIN}"), division.clone()));
        }
        corpus
            .root_reach
            .get_mut(root)
            .unwrap()
            .extend(reach.iter().cloned());
        corpus.division_reach.insert(division.clone(), reach);
    }

    // Program offices with small sub-units.
    let programs: [(&str, &str, &str, usize); 10] = [
        ("TP1", "TD1", "technical-program", 3),
        ("TP2", "TD1", "technical-program", 3),
        ("TP3", "TD2", "technical-program", 3),
        ("TP4", "TD2", "technical-program", 3),
        ("TP5", "TD3", "technical-program", 3),
        ("TP6", "TD3", "technical-program", 3),
        ("OP1", "OD1", "operations-program", 2),
        ("OP2", "OD2", "operations-program", 2),
        ("OP3", "OD3", "operations-program", 2),
        ("OP4", "OD1", "operations-program", 2),
    ];
    for (office, root, category, sub_units) in programs {
        corpus.units.push(Unit {
            id: office.to_string(),
            name: format!("Program Office {office}"),
            parent: Some(root.to_string()),
            category,
        });
        let mut reach = Vec::new();
        for j in 1..=sub_units {
            let unit_id = format!("{office}-U{j}");
            corpus.units.push(Unit {
                id: unit_id.clone(),
                name: format!("Program Unit {unit_id}"),
                parent: Some(office.to_string()),
                category,
            });
            let mut members = Vec::new();
            for _ in 0..2 {
                let address = new_user(&mut corpus, &unit_id);
                members.push(address.clone());
                reach.push(address);
            }
            corpus.members.insert(unit_id, members);
        }
        let lower = office.to_lowercase();
        corpus
            .directory
            .push((format!("mgr.{lower}@{DOMAIN}"), office.to_string()));
        for a in 1..=2 {
            corpus
                .directory
                .push((format!("asst{a}.{lower}@{DOMAIN}"), office.to_string()));
        }
        corpus
            .root_reach
            .get_mut(root)
            .unwrap()
            .extend(reach.iter().cloned());
        corpus.division_reach.insert(office.to_string(), reach);
    }

    assert_eq!(corpus.units.len(), 456, "chart must hold 456 units");
    corpus
}

/// Sample a workday-shaped timestamp: bimodal around 09:30 and 15:30.
fn workday_time(rng: &mut ChaCha20Rng, day_start: i64) -> i64 {
    let peak: f64 = if rng.random::<f64>() < 0.5 { 9.5 } else { 15.5 };
    let jitter = rng.random_range(-2.0..2.0) + rng.random_range(-1.0..1.0);
    let hour = (peak + jitter).clamp(6.5, 19.5);
    day_start + (hour * 3600.0) as i64
}

fn weekend_time(rng: &mut ChaCha20Rng, day_start: i64) -> i64 {
    day_start + rng.random_range(8 * 3600..20 * 3600)
}

/// Volume factor per day offset (Mon..Sun twice): lighter Fridays, quiet
/// weekends.
fn day_volume(day: i64) -> f64 {
    match day % 7 {
        0..=3 => 1.0,
        4 => 0.55,
        _ => 0.07,
    }
}

/// A random workday-weighted (day, timestamp) over the two weeks.
fn random_worktime(rng: &mut ChaCha20Rng) -> i64 {
    loop {
        let day = rng.random_range(0..14i64);
        if rng.random::<f64>() < day_volume(day) {
            let start = MONDAY + day * 86_400;
            return if day % 7 < 5 {
                workday_time(rng, start)
            } else {
                weekend_time(rng, start)
            };
        }
    }
}

/// A personal distribution list: a seeded subset of `reach` covering
/// `lo..=hi` of it.
fn personal_list(rng: &mut ChaCha20Rng, reach: &[String], lo: f64, hi: f64) -> Vec<String> {
    let mut list: Vec<String> = reach.to_vec();
    list.shuffle(rng);
    let fraction = rng.random_range(lo..hi);
    let keep = ((reach.len() as f64 * fraction).ceil() as usize).max(1);
    list.truncate(keep);
    list
}

fn main() {
    let corpus = build_structure();
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);

    let out_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo");
    std::fs::create_dir_all(&out_dir).expect("create demo dir");

    // Org chart CSV.
    let mut chart = String::from("unit_id,name,parent_id,category\n");
    for unit in &corpus.units {
        writeln!(
            chart,
            "{},{},{},{}",
            unit.id,
            unit.name,
            unit.parent.as_deref().unwrap_or(""),
            unit.category
        )
        .unwrap();
    }
    std::fs::write(out_dir.join("org_chart.csv"), chart).expect("write chart");

    // Directory CSV.
    let mut directory = String::from("address,unit_id\n");
    for (address, unit) in &corpus.directory {
        writeln!(directory, "{address},{unit}").unwrap();
    }
    std::fs::write(out_dir.join("directory.csv"), directory).expect("write directory");

    // Two-week email log.
    let mut lines: Vec<(i64, String)> = Vec::new();
    let push = |lines: &mut Vec<(i64, String)>, ts: i64, from: &str, to: &[String]| {
        lines.push((ts, format!("{ts},{from},\"{}\"", to.join(";"))));
    };
    let announce = format!("announce@{DOMAIN}");

    // Broadcasters with personal distribution lists. Managers of bigger
    // subtrees reach more addresses; two assistants per division share
    // the managerial load with their own (smaller) lists.
    let mut broadcasters: Vec<(String, Vec<String>, f64)> = Vec::new();
    for (unit, reach) in &corpus.division_reach {
        let manager = format!("mgr.{}@{DOMAIN}", unit.to_lowercase());
        broadcasters.push((manager, personal_list(&mut rng, reach, 0.55, 1.0), 0.4));
        for a in 1..=2 {
            let assistant = format!("asst{a}.{}@{DOMAIN}", unit.to_lowercase());
            broadcasters.push((assistant, personal_list(&mut rng, reach, 0.3, 0.8), 0.3));
        }
    }
    for (root, reach) in &corpus.root_reach {
        let director = format!("dir.{}@{DOMAIN}", root.to_lowercase());
        broadcasters.push((director, personal_list(&mut rng, reach, 0.65, 1.0), 0.25));
    }
    // Section leads: every three groups of a division share a section
    // list run by the first member of the first group.
    for reach in corpus.division_reach.values() {
        for section in reach.chunks(9) {
            if section.len() < 4 {
                continue;
            }
            let lead = section[0].clone();
            broadcasters.push((lead, section.to_vec(), 0.45));
        }
    }

    for day in 0..14i64 {
        let day_start = MONDAY + day * 86_400;
        let weekday = (day % 7) as usize;
        let volume = day_volume(day);
        let time = |rng: &mut ChaCha20Rng| {
            if weekday < 5 {
                workday_time(rng, day_start)
            } else {
                weekend_time(rng, day_start)
            }
        };

        // Intra-group chatter.
        for members in corpus.members.values() {
            let count =
                (volume * 2.0) as usize + usize::from(rng.random::<f64>() < (volume * 2.0).fract());
            for _ in 0..count {
                if members.len() < 2 {
                    continue;
                }
                let sender = members.choose(&mut rng).unwrap();
                let mut recipients: Vec<String> = Vec::new();
                let fanout = rng.random_range(1..=2.min(members.len() - 1));
                while recipients.len() < fanout {
                    let pick = members.choose(&mut rng).unwrap();
                    if pick != sender && !recipients.contains(pick) {
                        recipients.push(pick.clone());
                    }
                }
                push(&mut lines, time(&mut rng), sender, &recipients);
            }
        }

        // Distribution-list broadcasts.
        for (sender, list, rate) in &broadcasters {
            if rng.random::<f64>() < rate * volume {
                push(&mut lines, time(&mut rng), sender, list);
            }
        }

        // The all-hands announce account: an internal sender that is
        // deliberately not in the directory.
        if weekday < 5 && rng.random::<f64>() < 0.8 {
            push(&mut lines, time(&mut rng), &announce, &corpus.all_users);
        }

        // Bounce noise the cleaner should drop.
        for _ in 0..3 {
            let target = corpus.all_users.choose(&mut rng).unwrap();
            push(
                &mut lines,
                time(&mut rng),
                &format!("mailer-daemon@{DOMAIN}"),
                std::slice::from_ref(target),
            );
        }
    }

    // Heavy-tailed personal correspondence: each user keeps a contact
    // circle, mostly within their own division.
    let division_of: BTreeMap<&String, &Vec<String>> = corpus
        .division_reach
        .values()
        .flat_map(|reach| reach.iter().map(move |a| (a, reach)))
        .collect();
    for user in &corpus.all_users {
        let roll: f64 = rng.random::<f64>();
        // Discrete power-law-ish circle size via inverse sampling.
        let circle = ((1.0 - roll).powf(-1.0 / 1.45) as usize).clamp(1, 80);
        let local = division_of[user];
        let mut contacts: Vec<String> = Vec::new();
        for _ in 0..circle * 20 {
            if contacts.len() >= circle {
                break;
            }
            let pool = if rng.random::<f64>() < 0.7 {
                local
            } else {
                &corpus.all_users
            };
            let pick = pool.choose(&mut rng).unwrap();
            if pick != user && !contacts.contains(pick) {
                contacts.push(pick.clone());
            }
        }
        for contact in &contacts {
            let repeats = 1 + usize::from(rng.random::<f64>() < 0.3);
            for _ in 0..repeats {
                push(
                    &mut lines,
                    random_worktime(&mut rng),
                    user,
                    std::slice::from_ref(contact),
                );
            }
        }
    }

    // External traffic: operations lean commercial, everyone else leans
    // toward agencies and universities.
    let commercial = ["vendor.com", "supplier.net", "softserv.info"];
    let noncommercial = ["agency.gov", "university.edu", "proving.mil"];
    let other_ext = ["partner.de", "labs.ac.uk"];
    for _ in 0..1200 {
        let user = corpus.all_users.choose(&mut rng).unwrap();
        // Users were minted tech first, then ops (864..1296), then admin
        // and programs.
        let serial: usize = user[1..5].parse().unwrap();
        let ops = (864..1296).contains(&serial);
        let pool: &[&str] = match rng.random_range(0..10) {
            0..=4 => {
                if ops {
                    &commercial
                } else {
                    &noncommercial
                }
            }
            5..=7 => {
                if ops {
                    &noncommercial
                } else {
                    &commercial
                }
            }
            _ => &other_ext,
        };
        let host = pool.choose(&mut rng).unwrap();
        let contact = format!("contact{}@{host}", rng.random_range(0..40));
        let ts = random_worktime(&mut rng);
        if rng.random::<f64>() < 0.5 {
            push(&mut lines, ts, user, &[contact]);
        } else {
            push(&mut lines, ts, &contact, std::slice::from_ref(user));
        }
    }

    lines.sort();
    let mut log = String::from("timestamp,sender,recipients\n");
    for (_, line) in &lines {
        log.push_str(line);
        log.push('\n');
    }
    // A few malformed rows so ingest reporting has something to count.
    log.push_str("1639999999,broken-no-recipients@lab.test,\n");
    log.push_str("not-a-timestamp,u0000@lab.test,u0001@lab.test\n");
    std::fs::write(out_dir.join("email_log.csv"), log).expect("write log");

    // Pipeline config.
    let config = serde_json::json!({
        "log": "email_log.csv",
        "org_chart": "org_chart.csv",
        "directory": "directory.csv",
        "seed": 42,
        "cleaning": {
            "bounce_local_parts": ["bounce", "mailer-daemon", "no-reply", "noreply", "postmaster"],
            "internal_domain_suffix": DOMAIN,
            "keep_non_person_domains": true
        },
        "aggregation": { "level": 2, "by_category": false },
        // Soft springs: the unit graph has heavy broadcast hubs.
        "layout": { "algorithm": "force", "spring": 0.002, "step": 0.02, "max_iter": 600, "tol": 1e-4, "scheme": "betweenness-log" },
        "model": { "assumed_l": 4.0, "cutoff": 8, "log_binning_ratio": 2.0, "degree_mode": "distinct-recipients" },
        "temporal": { "bin_width_seconds": 60, "timezone_offset_seconds": 0 }
    });
    std::fs::write(
        out_dir.join("config.json"),
        serde_json::to_string_pretty(&config).unwrap() + "\n",
    )
    .expect("write config");

    println!(
        "demo corpus: {} units, {} directory rows, {} log records",
        corpus.units.len(),
        corpus.directory.len(),
        lines.len() + 2
    );
}
