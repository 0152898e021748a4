# package init for services
