mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mo_layout::config::LayoutConfig;
use mo_layout::crossmin::CrossMinStrategy;
use mo_layout::exec::Execution;
use mo_layout::geometry::{emit_layout_json, emit_svg, LayoutResult, SvgOptions};
use mo_layout::graph::{Direction, Graph};
use mo_layout::ingest::{dsl_to_graph, parse_dsl, parse_json_graph, InputKind};
use mo_layout::metrics::{shared_ids, stability_distance};
use mo_layout::pipeline::{layout, layout_batch, Layout, PHASES};

use common::*;

fn load(path: &std::path::Path) -> (Graph, LayoutConfig) {
    let text = std::fs::read_to_string(path).unwrap();
    let kind = InputKind::detect(path, &text);
    let g = match kind {
        InputKind::Dsl => dsl_to_graph(&parse_dsl(&text).unwrap()).unwrap(),
        InputKind::Json => parse_json_graph(&text).unwrap(),
    };
    (g, LayoutConfig::for_input(kind))
}

fn all_fixtures() -> Vec<std::path::PathBuf> {
    let mut v = files("dsl", "chart");
    v.extend(files("json", "json"));
    v
}

fn build(n: usize, edges: &[(usize, usize)], direction: Direction) -> Graph {
    let mut g = Graph::new(direction);
    for i in 0..n {
        g.add_node(format!("v{i}"));
    }
    for &(a, b) in edges {
        g.add_edge(&format!("v{}", a % n), &format!("v{}", b % n));
    }
    g
}

fn check_geometry(r: &LayoutResult) -> Result<(), String> {
    let pts = r.extent_points();
    if pts.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    let c = r.canvas;
    for p in &pts {
        if p.x < c.x - 1e-6 || p.y < c.y - 1e-6 || p.x > c.x + c.width + 1e-6 || p.y > c.y + c.height + 1e-6 {
            return Err(format!("{p:?} outside canvas {c:?}"));
        }
    }
    for n in &r.nodes {
        if let Some(child) = &n.children {
            check_geometry(child)?;
        }
    }
    Ok(())
}

#[test]
fn json_round_trip_on_fixtures() {
    for path in all_fixtures() {
        let (g, config) = load(&path);
        let l = layout(&g, &config).unwrap();
        let text = emit_layout_json(&l.graph, &l.result);
        let back = parse_json_graph(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(back, l.graph, "{}", path.display());
    }
}

#[test]
fn fixtures_have_finite_geometry_inside_the_canvas() {
    for path in all_fixtures() {
        let (g, config) = load(&path);
        let l = layout(&g, &config).unwrap();
        check_geometry(&l.result).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn trace_lists_every_phase() {
    let (g, config) = load(&fixtures().join("dsl/handshake.chart"));
    let trace = layout(&g, &config).unwrap().trace();
    let names: Vec<&str> = trace.sections.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, PHASES);
    let text = trace.render();
    assert!(text.contains("Done.1 (Done->Start)"), "{text}");
}

#[test]
fn svg_of_empty_graph() {
    let l = layout(&Graph::default(), &LayoutConfig::dataflow()).unwrap();
    let svg = emit_svg(&l.result, &SvgOptions::default());
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("<rect"));
}

#[test]
fn svg_of_single_node() {
    let mut g = Graph::default();
    g.add_node("only");
    let l = layout(&g, &LayoutConfig::dataflow()).unwrap();
    let svg = emit_svg(&l.result, &SvgOptions::default());
    assert_eq!(svg.matches("<rect").count(), 1);
    assert!(svg.contains(">only</text>"));
    assert!(!svg.contains("<polyline"));
}

#[test]
fn svg_of_handshake() {
    let (g, config) = load(&fixtures().join("dsl/handshake.chart"));
    let l = layout(&g, &config).unwrap();
    let svg = emit_svg(&l.result, &SvgOptions::default());
    assert_eq!(svg.matches("<rect").count(), 5);
    assert_eq!(svg.matches("<polyline").count(), g.edges.len());
    // connector carries no label
    assert!(!svg.contains(">C</text>"));
    for label in ["Start", "Send", "Receive", "Done"] {
        assert!(svg.contains(&format!(">{label}</text>")), "{label}");
    }
}

#[test]
fn long_edges_bend_once_per_crossed_layer() {
    let (g, config) = load(&fixtures().join("json/cycles.json"));
    let l = layout(&g, &config).unwrap();
    for e in &l.result.edges {
        if e.source == e.target {
            continue;
        }
        let span = l.result.node(&e.source).unwrap().layer.abs_diff(l.result.node(&e.target).unwrap().layer);
        assert!(e.points.len() > span, "{}: {} points over {span} layers", e.id, e.points.len());
    }
}

#[test]
fn parallel_batch_matches_sequential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let graphs: Vec<Graph> = (0..24).map(|_| random_graph(&mut rng, 20, 40)).collect();
    let config = LayoutConfig::dataflow();
    let results = |exec| -> Vec<LayoutResult> {
        layout_batch(exec, &graphs, &config).into_iter().map(|r| r.unwrap().result).collect()
    };
    assert_eq!(results(Execution::Sequential), results(Execution::Parallel));
}

fn strict(direction: Direction) -> LayoutConfig {
    let mut c = LayoutConfig::dataflow();
    c.crossing_min = CrossMinStrategy::StrictMo;
    c.direction = Some(direction);
    c
}

fn in_layer_coordinate(l: &Layout, id: &str) -> f64 {
    let n = l.result.node(id).unwrap();
    match l.result.direction {
        Direction::Right => n.y + n.height / 2.0,
        Direction::Down => n.x + n.width / 2.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_graphs_have_finite_geometry(n in 1usize..25, edges in prop::collection::vec((0usize..25, 0usize..25), 0..60), down in any::<bool>()) {
        let dir = if down { Direction::Down } else { Direction::Right };
        let g = build(n, &edges, dir);
        let l = layout(&g, &LayoutConfig::dataflow()).unwrap();
        prop_assert_eq!(check_geometry(&l.result), Ok(()));
        prop_assert_eq!(l.result.nodes.len(), n);
        prop_assert_eq!(l.result.edges.len(), edges.len());
    }

    #[test]
    fn strict_order_shows_in_coordinates(n in 1usize..20, edges in prop::collection::vec((0usize..20, 0usize..20), 0..40), down in any::<bool>()) {
        let dir = if down { Direction::Down } else { Direction::Right };
        let g = build(n, &edges, dir);
        let l = layout(&g, &strict(dir)).unwrap();
        for a in &l.result.nodes {
            for b in &l.result.nodes {
                let (ma, mb) = (l.graph.node(&a.id).unwrap().model_order, l.graph.node(&b.id).unwrap().model_order);
                if a.layer == b.layer && ma < mb {
                    prop_assert!(in_layer_coordinate(&l, &a.id) < in_layer_coordinate(&l, &b.id));
                }
            }
        }
    }

    #[test]
    fn layout_is_deterministic(n in 1usize..20, edges in prop::collection::vec((0usize..20, 0usize..20), 0..40), seed in 0u64..1000) {
        let g = build(n, &edges, Direction::Right);
        let mut config = LayoutConfig::dataflow();
        config.crossing_min = CrossMinStrategy::Barycenter;
        config.seed = seed;
        let (a, b) = (layout(&g, &config).unwrap(), layout(&g, &config).unwrap());
        prop_assert_eq!(emit_layout_json(&a.graph, &a.result), emit_layout_json(&b.graph, &b.result));
    }

    #[test]
    fn stability_distance_is_a_pseudo_metric(n in 1usize..15, e1 in prop::collection::vec((0usize..15, 0usize..15), 0..30), e2 in prop::collection::vec((0usize..15, 0usize..15), 0..30)) {
        let config = LayoutConfig::dataflow();
        let a = layout(&build(n, &e1, Direction::Right), &config).unwrap().result;
        let b = layout(&build(n, &e2, Direction::Right), &config).unwrap().result;
        let same = stability_distance(&a, &a, &shared_ids(&a, &a)).unwrap();
        prop_assert_eq!(same.displacement, 0.0);
        prop_assert_eq!(same.order_flips, 0);
        let ab = stability_distance(&a, &b, &shared_ids(&a, &b)).unwrap();
        let ba = stability_distance(&b, &a, &shared_ids(&b, &a)).unwrap();
        prop_assert!(ab.displacement >= 0.0);
        prop_assert!((ab.displacement - ba.displacement).abs() < 1e-9);
        prop_assert_eq!(ab.order_flips, ba.order_flips);
    }
}
