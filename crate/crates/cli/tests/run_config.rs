use clap::Parser;
use proptest::prelude::*;

use rectmix::assembly::BoundaryCondition;
use rectmix::refelem::three_d::ShearPlane;
use rectmix::stability::InfSupNorm;
use rectmix::study::StressNorm;
use rectmix::Family;
use rectmix_cli::config::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Full), Just(Family::Reduced)]
}

fn bc() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![Just(BoundaryCondition::Displacement), Just(BoundaryCondition::Traction)]
}

fn levels() -> impl Strategy<Value = Levels> {
    prop_oneof![
        (1usize..10).prop_map(Levels::UpTo),
        (1usize..5, 0usize..4).prop_map(|(a, d)| Levels::Range { from: a, to: a + d }),
        proptest::collection::vec(1usize..10, 1..4).prop_map(Levels::List),
    ]
}

fn positive() -> impl Strategy<Value = f64> {
    (1u32..1000, 0i32..3).prop_map(|(m, e)| m as f64 / 10f64.powi(e))
}

fn problem_args() -> impl Strategy<Value = ProblemArgs> {
    (
        proptest::option::of("[a-z]{1,8}\\.cfg"),
        proptest::option::of(1usize..9),
        proptest::option::of(1usize..4),
        proptest::option::of(family()),
        proptest::option::of(bc()),
        proptest::option::of(1u8..=2),
        proptest::option::of(positive()),
        proptest::option::of(positive()),
    )
        .prop_map(|(config, n, k, family, bc, problem, lambda, mu)| ProblemArgs {
            config: config.map(Into::into),
            n,
            k,
            family,
            bc,
            problem,
            lambda,
            mu,
        })
}

fn command() -> impl Strategy<Value = Command> {
    prop_oneof![
        (1u8..=2, 1usize..4, family(), levels(), prop_oneof![Just(StressNorm::Vector), Just(StressNorm::Frobenius), Just(StressNorm::FirstComponent)], positive(), positive())
            .prop_map(|(problem, k, family, levels, stress_norm, lambda, mu)| Command::Converge(ConvergeArgs {
                problem,
                k,
                family,
                levels,
                stress_norm,
                lambda,
                mu
            })),
        (1usize..4, family(), bc(), proptest::collection::vec(1usize..9, 1..4), prop_oneof![Just(InfSupNorm::Hdiv), Just(InfSupNorm::MeshDependent)])
            .prop_map(|(k, family, bc, n, norm)| Command::Infsup(InfsupArgs { k, family, bc, n, norm })),
        proptest::option::of(2u8..=3).prop_map(|dim| Command::Unisolvence(UnisolvenceArgs { dim })),
        (1usize..4, family(), 1usize..5).prop_map(|(k, family, m)| Command::Kernel(KernelArgs { k, family, n: 2 * m })),
        (
            prop_oneof![Just(ElementKind::Stress), Just(ElementKind::Normal), Just(ElementKind::Shear), Just(ElementKind::Displacement)],
            2u8..=3,
            1usize..4,
            family(),
            proptest::option::of(prop_oneof![Just(ShearPlane::XY), Just(ShearPlane::XZ), Just(ShearPlane::YZ)])
        )
            .prop_map(|(element, dim, k, family, plane)| Command::ExportBasis(ExportBasisArgs { element, dim, k, family, plane })),
        (problem_args(), prop_oneof![Just(MatrixBlock::Compliance), Just(MatrixBlock::Divergence), Just(MatrixBlock::Constraints), Just(MatrixBlock::System)])
            .prop_map(|(problem, block)| Command::ExportMatrix(ExportMatrixArgs { problem, block })),
        problem_args().prop_map(|problem| Command::Solve(SolveArgs { problem })),
    ]
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    (
        command(),
        prop_oneof![Just(Format::Csv), Just(Format::Md), Just(Format::Json)],
        proptest::option::of("[a-z]{1,6}/[a-z]{1,6}\\.(csv|md|json)"),
    )
        .prop_map(|(command, format, output)| RunConfig {
            format,
            output: output.map(Into::into),
            command,
        })
}

proptest! {
    #[test]
    fn json_round_trip(cfg in run_config()) {
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn argv_round_trip(cfg in run_config()) {
        let mut argv = vec!["rectmix".to_string()];
        argv.extend(cfg.to_args());
        let back = RunConfig::try_parse_from(&argv).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn level_specs() {
    assert_eq!("5".parse::<Levels>().unwrap().resolve(2), vec![2, 3, 4, 5]);
    assert_eq!("2-4".parse::<Levels>().unwrap().resolve(1), vec![2, 3, 4]);
    assert_eq!("1,3".parse::<Levels>().unwrap().resolve(1), vec![1, 3]);
    assert_eq!("3,".parse::<Levels>(), Ok(Levels::List(vec![3])));
    for bad in ["0", "4-2", "a", "1,0"] {
        assert!(bad.parse::<Levels>().is_err(), "{bad}");
    }
}
