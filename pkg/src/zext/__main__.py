from zext.cli import main

main()
