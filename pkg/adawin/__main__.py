from adawin.cli import main

raise SystemExit(main())
