//! With zero starting stock and demand kept nonnegative, the inventory
//! instance reproduces the published comparison to within 1e-3.

use rosom::cutplane::CutPlaneConfig;
use rosom::problems::{inventory, InventoryParams};
use rosom::solve::solve;

#[test]
fn truncated_inventory_matches_published_values() {
    let p = inventory(&InventoryParams::default()).unwrap();
    let cfg = CutPlaneConfig { epsilon: 0.1, ..CutPlaneConfig::default() };
    let expected = [
        ("rcr", 120.000),
        ("aarcr", 120.000),
        ("split:6", 107.627),
        ("split:4", 94.456),
        ("split:3", 83.631),
        ("split:2", 68.613),
        ("eorlc", 48.750),
    ];
    for (m, want) in expected {
        let got = solve(&p, m.parse().unwrap(), &cfg).unwrap().value;
        assert!((got - want).abs() < 1e-3, "{m}: {got} vs {want}");
    }
}
