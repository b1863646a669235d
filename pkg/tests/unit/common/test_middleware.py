from profile_variance_monitor.common.middleware import (
    UNHANDLED_ERROR_EXIT_CODE,
    error_handling,
    run_id_context,
    with_run_id,
)


def test_with_run_id_should_expose_a_fresh_run_id_to_the_handler() -> None:
    seen: list[str] = []

    @with_run_id
    def handler() -> int:
        seen.append(run_id_context.get(""))
        return 0

    assert handler() == 0
    assert len(seen[0]) == 12
    assert run_id_context.get("") == ""


def test_with_run_id_should_keep_an_existing_run_id() -> None:
    seen: list[str] = []

    @with_run_id
    def handler() -> int:
        seen.append(run_id_context.get(""))
        return 0

    token = run_id_context.set("outer-run")
    try:
        handler()
    finally:
        run_id_context.reset(token)

    assert seen == ["outer-run"]


def test_with_run_id_should_use_distinct_ids_across_invocations() -> None:
    seen: list[str] = []

    @with_run_id
    def handler() -> int:
        seen.append(run_id_context.get(""))
        return 0

    handler()
    handler()

    assert seen[0] != seen[1]


def test_error_handling_should_pass_exit_code_when_no_exception() -> None:
    @error_handling
    def handler(value: int) -> int:
        return value

    assert handler(3) == 3


def test_error_handling_should_return_generic_failure_when_exception_raised() -> None:
    @error_handling
    def handler() -> int:
        raise ValueError("Test error")

    assert handler() == UNHANDLED_ERROR_EXIT_CODE
